//! Word-by-word comparison of two representations' spectra.

use rayon::prelude::*;
use serde::Serialize;

use super::RigidityError;
use crate::groups::{Alphabet, BallLimits, RepresentationSpec, WordBall};
use crate::matrix::RatMatrix;
use crate::spectra::{evaluate_invariant, jordan, Invariant, SpectraError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpectraVerdict {
    SpectraEqual,
    Separated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatingWord {
    pub word: String,
    pub length: usize,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub invariant: Invariant,
    pub radius: usize,
    pub verdict: SpectraVerdict,
    pub separating_word: Option<SeparatingWord>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub words_compared: usize,
    /// Every nonidentity word has loxodromic linear part in both images.
    pub all_loxodromic: bool,
}

/// Generators of `rep2` in the order of `rep1`'s names.
pub(crate) fn aligned(rep1: &RepresentationSpec, rep2: &RepresentationSpec) -> Result<Vec<(RatMatrix, RatMatrix)>, RigidityError> {
    let names1 = rep1.names();
    let mut names2 = rep2.names();
    let mut sorted1 = names1.clone();
    sorted1.sort();
    names2.sort();
    if sorted1 != names2 {
        return Err(RigidityError::Domain(format!(
            "generator names differ: {:?} vs {:?}",
            rep1.names(),
            rep2.names()
        )));
    }
    Ok(names1
        .iter()
        .map(|n| {
            (
                rep1.image(n).expect("listed").matrix().clone(),
                rep2.image(n).expect("same names").matrix().clone(),
            )
        })
        .collect())
}

/// Ball of the paired representation `s ↦ (ρ₁(s), ρ₂(s))`, so a word is
/// dropped only when it repeats an element in both images at once.
pub fn paired_ball(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    radius: usize,
    limits: BallLimits,
) -> Result<WordBall, RigidityError> {
    let pairs = aligned(rep1, rep2)?;
    let alphabet = Alphabet::new(
        rep1.names(),
        pairs.iter().map(|(a, b)| RatMatrix::block_diag(a, b)).collect(),
        rep1.symmetric_closure && rep2.symmetric_closure,
    )?;
    Ok(WordBall::enumerate(&alphabet, radius, limits)?)
}

fn linear_block(rep: &RepresentationSpec, m: &RatMatrix) -> RatMatrix {
    if rep.is_affine() {
        let n = rep.ambient.n();
        m.submatrix(0, 0, n, n)
    } else {
        m.clone()
    }
}

fn discrepancy(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

struct Row {
    word: Vec<usize>,
    values: Option<(Vec<f64>, Vec<f64>)>,
    loxodromic: bool,
}

/// Compares an invariant over the paired ball. Differences are measured as
/// the largest entrywise gap divided by `max(1, largest |entry|)`.
pub fn compare_spectra(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    invariant: Invariant,
    radius: usize,
    tol: f64,
    limits: BallLimits,
) -> Result<ComparisonReport, RigidityError> {
    if rep1.ambient.matrix_size() != rep2.ambient.matrix_size() {
        return Err(RigidityError::Domain("representations have different matrix sizes".into()));
    }
    if invariant.needs_affine() && !(rep1.is_affine() && rep2.is_affine()) {
        return Err(RigidityError::Domain(format!("{invariant} needs affine representations")));
    }
    let b = paired_ball(rep1, rep2, radius, limits)?;
    let size = rep1.ambient.matrix_size();
    let entries = b.sorted();
    let rows: Vec<Result<Row, RigidityError>> = entries
        .par_iter()
        .map(|(w, m)| {
            let m1 = m.submatrix(0, 0, size, size);
            let m2 = m.submatrix(size, size, size, size);
            let identity = w.is_empty();
            let loxodromic = identity
                || [(rep1, &m1), (rep2, &m2)].iter().all(|(r, x)| {
                    jordan(&linear_block(r, x)).map(|j| j.is_loxodromic()).unwrap_or(false)
                });
            if identity && invariant.needs_affine() {
                return Ok(Row { word: w.to_vec(), values: None, loxodromic });
            }
            let eval = |r: &RepresentationSpec, x: &RatMatrix| match evaluate_invariant(r, invariant, x) {
                Err(SpectraError::NotLoxodromic { .. }) | Err(SpectraError::Degenerate(_)) => {
                    Err(RigidityError::NonLoxodromicWord(b.alphabet().format(w)))
                }
                other => other.map_err(RigidityError::from),
            };
            let v1 = eval(rep1, &m1)?;
            let v2 = eval(rep2, &m2)?;
            Ok(Row { word: w.to_vec(), values: Some((v1, v2)), loxodromic })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut max_discrepancy = 0.0f64;
    let mut separating = None;
    let mut compared = 0;
    for row in &rows {
        let Some((v1, v2)) = &row.values else { continue };
        compared += 1;
        let d = discrepancy(v1, v2);
        max_discrepancy = max_discrepancy.max(d);
        if d > tol && separating.is_none() {
            separating = Some(SeparatingWord {
                word: b.alphabet().format(&row.word),
                length: row.word.len(),
                first: v1.clone(),
                second: v2.clone(),
                difference: d,
            });
        }
    }
    Ok(ComparisonReport {
        invariant,
        radius,
        verdict: if separating.is_some() { SpectraVerdict::Separated } else { SpectraVerdict::SpectraEqual },
        separating_word: separating,
        max_discrepancy,
        tolerance: tol,
        words_compared: compared,
        all_loxodromic: rows.iter().all(|r| r.loxodromic),
    })
}
