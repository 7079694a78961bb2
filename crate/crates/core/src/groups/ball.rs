//! Breadth-first enumeration of word balls with exact deduplication.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::GroupError;
use crate::matrix::RatMatrix;

/// Word over an alphabet, as symbol indices.
pub type Word = Vec<usize>;

/// Symmetric generating set: named matrices with an inverse map.
#[derive(Clone, Debug)]
pub struct Alphabet {
    names: Arc<Vec<String>>,
    matrices: Vec<RatMatrix>,
    inverse: Vec<usize>,
    generators: usize,
}

fn inverse_name(name: &str) -> String {
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => c.to_ascii_uppercase().to_string(),
        _ => format!("{name}^-1"),
    }
}

impl Alphabet {
    /// Declared generators first, then the inverses not already present, in
    /// declaration order. Without closure every inverse must be declared.
    pub fn new(
        names: Vec<String>,
        matrices: Vec<RatMatrix>,
        symmetric_closure: bool,
    ) -> Result<Self, GroupError> {
        assert_eq!(names.len(), matrices.len());
        let generators = names.len();
        let mut names = names;
        let mut matrices = matrices;
        let mut inverse = vec![usize::MAX; generators];
        for i in 0..generators {
            if inverse[i] != usize::MAX {
                continue;
            }
            let inv = matrices[i]
                .inverse()
                .ok_or_else(|| GroupError::Domain(format!("generator '{}' is singular", names[i])))?;
            if let Some(j) = matrices.iter().position(|m| *m == inv) {
                inverse[i] = j;
                if j < inverse.len() {
                    inverse[j] = i;
                }
                continue;
            }
            if !symmetric_closure {
                return Err(GroupError::NotSymmetric(names[i].clone()));
            }
            let name = inverse_name(&names[i]);
            if names.contains(&name) {
                return Err(GroupError::InvalidRepresentation(format!(
                    "inverse name '{name}' collides with a declared generator"
                )));
            }
            names.push(name);
            matrices.push(inv);
            inverse[i] = matrices.len() - 1;
            inverse.push(i);
        }
        Ok(Alphabet { names: Arc::new(names), matrices, inverse, generators })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrices(&self) -> &[RatMatrix] {
        &self.matrices
    }

    pub fn inverse_of(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn declared(&self) -> usize {
        self.generators
    }

    pub fn size(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.rows())
    }

    pub fn evaluate(&self, word: &[usize]) -> RatMatrix {
        word.iter()
            .fold(RatMatrix::identity(self.size()), |acc, &s| acc.mul(&self.matrices[s]))
    }

    pub fn format(&self, word: &[usize]) -> String {
        format_word(word, &self.names)
    }

    /// Parses a word written with the alphabet's names (concatenated when
    /// every name is a single character, otherwise space-separated).
    pub fn parse_word(&self, text: &str) -> Option<Word> {
        let t = text.trim();
        if t.is_empty() || t == "e" && !self.names.iter().any(|n| n == "e") {
            return Some(vec![]);
        }
        if self.names.iter().all(|n| n.chars().count() == 1) {
            t.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| self.names.iter().position(|n| n.starts_with(c)))
                .collect()
        } else {
            t.split_whitespace().map(|w| self.names.iter().position(|n| n == w)).collect()
        }
    }
}

/// Renders a word; the empty word is `e`.
pub fn format_word(word: &[usize], names: &[String]) -> String {
    if word.is_empty() {
        return "e".into();
    }
    let sep = if names.iter().all(|n| n.chars().count() == 1) { "" } else { " " };
    word.iter().map(|&s| names[s].as_str()).collect::<Vec<_>>().join(sep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallLimits {
    pub max_entries: usize,
    /// Per-entry bit budget for numerators and denominators.
    pub max_entry_bits: u64,
}

impl Default for BallLimits {
    fn default() -> Self {
        BallLimits { max_entries: 2_000_000, max_entry_bits: 1 << 16 }
    }
}

/// Two distinct reduced words with the same matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coincidence {
    pub first: String,
    pub second: String,
}

/// Distinct elements of word length at most `radius`, each labelled with its
/// shortest word, ties broken lexicographically in symbol order.
#[derive(Clone, Debug)]
pub struct WordBall {
    radius: usize,
    alphabet: Alphabet,
    entries: HashMap<RatMatrix, Word>,
    coincidences: usize,
    examples: Vec<(Word, Word)>,
}

const KEPT_EXAMPLES: usize = 16;

/// Incremental breadth-first walk: each call to [`BallWalker::next_level`]
/// yields the new elements of the next sphere in lexicographic word order.
#[derive(Clone, Debug)]
pub struct BallWalker {
    alphabet: Alphabet,
    limits: BallLimits,
    radius: usize,
    entries: HashMap<RatMatrix, Word>,
    frontier: Vec<(Word, RatMatrix)>,
    coincidences: usize,
    examples: Vec<(Word, Word)>,
}

impl BallWalker {
    pub fn new(alphabet: &Alphabet, limits: BallLimits) -> Self {
        let id = RatMatrix::identity(alphabet.size());
        let mut entries = HashMap::new();
        entries.insert(id.clone(), vec![]);
        BallWalker {
            alphabet: alphabet.clone(),
            limits,
            radius: 0,
            entries,
            frontier: vec![(vec![], id)],
            coincidences: 0,
            examples: Vec::new(),
        }
    }

    /// Radius enumerated so far.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Elements first reached at the current radius.
    pub fn frontier(&self) -> &[(Word, RatMatrix)] {
        &self.frontier
    }

    pub fn next_level(&mut self) -> Result<&[(Word, RatMatrix)], GroupError> {
        let alphabet = &self.alphabet;
        let r = self.radius + 1;
        let expanded: Vec<Vec<(Word, RatMatrix)>> = self
            .frontier
            .par_iter()
            .map(|(w, m)| {
                (0..alphabet.len())
                    .filter(|&s| w.last().is_none_or(|&l| alphabet.inverse_of(l) != s))
                    .map(|s| {
                        let mut nw = w.clone();
                        nw.push(s);
                        (nw, m.mul(&alphabet.matrices[s]))
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        // candidates arrive in lexicographic word order
        for (w, m) in expanded.into_iter().flatten() {
            if m.max_entry_bits() > self.limits.max_entry_bits {
                return Err(GroupError::EnumerationAborted {
                    radius_reached: r - 1,
                    entries: self.entries.len(),
                    reason: format!("entry size exceeds {} bits", self.limits.max_entry_bits),
                });
            }
            if let Some(existing) = self.entries.get(&m) {
                self.coincidences += 1;
                if self.examples.len() < KEPT_EXAMPLES {
                    self.examples.push((existing.clone(), w));
                }
                continue;
            }
            self.entries.insert(m.clone(), w.clone());
            next.push((w, m));
            if self.entries.len() > self.limits.max_entries {
                return Err(GroupError::EnumerationAborted {
                    radius_reached: r - 1,
                    entries: self.entries.len(),
                    reason: format!("more than {} entries", self.limits.max_entries),
                });
            }
        }
        self.frontier = next;
        self.radius = r;
        Ok(&self.frontier)
    }

    pub fn into_ball(self) -> WordBall {
        WordBall {
            radius: self.radius,
            alphabet: self.alphabet,
            entries: self.entries,
            coincidences: self.coincidences,
            examples: self.examples,
        }
    }
}

impl WordBall {
    pub fn enumerate(alphabet: &Alphabet, radius: usize, limits: BallLimits) -> Result<Self, GroupError> {
        let mut walker = BallWalker::new(alphabet, limits);
        while walker.radius() < radius {
            walker.next_level()?;
        }
        Ok(walker.into_ball())
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn word_of(&self, m: &RatMatrix) -> Option<&Word> {
        self.entries.get(m)
    }

    pub fn contains(&self, m: &RatMatrix) -> bool {
        self.entries.contains_key(m)
    }

    /// Entries sorted by word length, then lexicographically.
    pub fn sorted(&self) -> Vec<(&Word, &RatMatrix)> {
        let mut v: Vec<(&Word, &RatMatrix)> = self.entries.iter().map(|(m, w)| (w, m)).collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Number of reduced words that hit an already enumerated matrix.
    pub fn coincidence_count(&self) -> usize {
        self.coincidences
    }

    pub fn coincidences(&self) -> Vec<Coincidence> {
        self.examples
            .iter()
            .map(|(a, b)| Coincidence { first: self.alphabet.format(a), second: self.alphabet.format(b) })
            .collect()
    }

    /// Canonical text form: one `word matrix` line per entry in sorted order.
    pub fn canonical_listing(&self) -> String {
        let mut out = String::new();
        for (w, m) in self.sorted() {
            out.push_str(&self.alphabet.format(w));
            out.push(' ');
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }
}
