//! Representations as generator assignments, with a JSON file format.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ball::{Alphabet, BallLimits, WordBall};
use super::{affine_embed, AffineElement, AmbientGroup, GroupElement, GroupError};
use crate::matrix::{format_rational, RatMatrix, Rational};
use crate::poly::parse_rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub image: GroupElement,
}

/// Named generator images in a common ambient group.
#[derive(Clone, Debug)]
pub struct RepresentationSpec {
    pub ambient: Arc<AmbientGroup>,
    pub generators: Vec<Generator>,
    pub symmetric_closure: bool,
    /// Symmetric bilinear form preserved by the (linear parts of the) images.
    pub invariant_form: Option<RatMatrix>,
    /// User assertion that the image is Zariski dense in the ambient.
    pub assume_zariski_dense: bool,
}

impl RepresentationSpec {
    pub fn new(ambient: Arc<AmbientGroup>, generators: Vec<(String, RatMatrix)>) -> Result<Self, GroupError> {
        let mut gens = Vec::with_capacity(generators.len());
        for (name, m) in generators {
            validate_name(&name)?;
            if gens.iter().any(|g: &Generator| g.name == name) {
                return Err(GroupError::InvalidRepresentation(format!("duplicate generator '{name}'")));
            }
            let image = GroupElement::new(ambient.clone(), m).map_err(|e| {
                GroupError::InvalidRepresentation(format!("generator '{name}': {e}"))
            })?;
            gens.push(Generator { name, image });
        }
        if gens.is_empty() {
            return Err(GroupError::InvalidRepresentation("no generators".into()));
        }
        Ok(RepresentationSpec {
            ambient,
            generators: gens,
            symmetric_closure: true,
            invariant_form: None,
            assume_zariski_dense: false,
        })
    }

    /// Representation into `SL(n)` from integer rows.
    pub fn sl_from_i64(generators: &[(&str, &[&[i64]])]) -> Result<Self, GroupError> {
        let n = generators.first().map_or(0, |g| g.1.len());
        Self::new(
            Arc::new(AmbientGroup::SpecialLinear(n)),
            generators.iter().map(|(name, rows)| (name.to_string(), RatMatrix::from_i64_rows(rows))).collect(),
        )
    }

    /// Affine representation from linear parts and translations.
    pub fn affine(generators: Vec<(String, AffineElement)>) -> Result<Self, GroupError> {
        let n = generators
            .first()
            .map(|g| g.1.dim())
            .ok_or_else(|| GroupError::InvalidRepresentation("no generators".into()))?;
        Self::new(
            Arc::new(AmbientGroup::AffineSpecialLinear(n)),
            generators.into_iter().map(|(name, e)| (name, affine_embed(&e).into_matrix())).collect(),
        )
    }

    pub fn with_invariant_form(mut self, form: RatMatrix) -> Self {
        self.invariant_form = Some(form);
        self
    }

    pub fn with_density_assertion(mut self, dense: bool) -> Self {
        self.assume_zariski_dense = dense;
        self
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn image(&self, name: &str) -> Option<&GroupElement> {
        self.generators.iter().find(|g| g.name == name).map(|g| &g.image)
    }

    pub fn is_affine(&self) -> bool {
        self.ambient.is_affine()
    }

    pub fn alphabet(&self) -> Result<Alphabet, GroupError> {
        Alphabet::new(
            self.names(),
            self.generators.iter().map(|g| g.image.matrix().clone()).collect(),
            self.symmetric_closure,
        )
    }

    /// Affine generator images; fails for non-affine ambients.
    pub fn affine_generators(&self) -> Result<Vec<AffineElement>, GroupError> {
        self.generators.iter().map(|g| AffineElement::from_embedded(&g.image)).collect()
    }

    /// The linear-part representation of an affine one.
    pub fn linear_part(&self) -> Result<RepresentationSpec, GroupError> {
        let AmbientGroup::AffineSpecialLinear(n) = *self.ambient else {
            return Err(GroupError::Domain("not an affine representation".into()));
        };
        let gens = self
            .affine_generators()?
            .into_iter()
            .zip(&self.generators)
            .map(|(e, g)| (g.name.clone(), e.linear().matrix().clone()))
            .collect();
        let mut out = Self::new(Arc::new(AmbientGroup::SpecialLinear(n)), gens)?;
        out.symmetric_closure = self.symmetric_closure;
        out.invariant_form = self.invariant_form.clone();
        out.assume_zariski_dense = self.assume_zariski_dense;
        Ok(out)
    }

    /// The representation `s ↦ C⁻¹ ρ(s) C`; `C` must be invertible of the ambient size.
    pub fn conjugated_by(&self, c: &RatMatrix) -> Result<RepresentationSpec, GroupError> {
        let inv = c
            .inverse()
            .ok_or_else(|| GroupError::Domain("conjugating matrix is singular".into()))?;
        let gens = self
            .generators
            .iter()
            .map(|g| (g.name.clone(), inv.mul(g.image.matrix()).mul(c)))
            .collect();
        let mut out = Self::new(self.ambient.clone(), gens)?;
        out.symmetric_closure = self.symmetric_closure;
        out.assume_zariski_dense = self.assume_zariski_dense;
        out.invariant_form = self.invariant_form.as_ref().map(|q| {
            // affine conjugators act on the form through their linear block
            let a = c.submatrix(0, 0, q.rows(), q.rows());
            a.transpose().mul(q).mul(&a)
        });
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self, GroupError> {
        let file: RepresentationFile =
            serde_json::from_str(text).map_err(|e| GroupError::InvalidRepresentation(e.to_string()))?;
        file.into_spec()
    }

    pub fn to_file(&self) -> RepresentationFile {
        let affine = self.is_affine();
        let n = self.ambient.n();
        RepresentationFile {
            ambient: AmbientField { kind: self.ambient.kind_name(), n },
            generators: self
                .generators
                .iter()
                .map(|g| {
                    let m = g.image.matrix();
                    if affine {
                        GeneratorField {
                            name: g.name.clone(),
                            matrix: text_rows(&m.submatrix(0, 0, n, n)),
                            translation: Some((0..n).map(|i| Entry::Text(format_rational(&m[(i, n)]))).collect()),
                        }
                    } else {
                        GeneratorField { name: g.name.clone(), matrix: text_rows(m), translation: None }
                    }
                })
                .collect(),
            symmetric_closure: self.symmetric_closure,
            invariant_form: self.invariant_form.as_ref().map(text_rows),
            assume_zariski_dense: self.assume_zariski_dense.then_some(true),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }
}

/// Enumerates the word ball of a representation with default limits.
pub fn ball(rep: &RepresentationSpec, radius: usize) -> Result<WordBall, GroupError> {
    ball_with_limits(rep, radius, BallLimits::default())
}

pub fn ball_with_limits(
    rep: &RepresentationSpec,
    radius: usize,
    limits: BallLimits,
) -> Result<WordBall, GroupError> {
    WordBall::enumerate(&rep.alphabet()?, radius, limits)
}

fn validate_name(name: &str) -> Result<(), GroupError> {
    let ok = !name.is_empty()
        && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        && name != "e";
    if ok {
        Ok(())
    } else {
        Err(GroupError::InvalidRepresentation(format!("invalid generator name '{name}'")))
    }
}

fn text_rows(m: &RatMatrix) -> Vec<Vec<Entry>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| Entry::Text(format_rational(&m[(i, j)]))).collect())
        .collect()
}

/// Matrix entry as written in a file: an integer or a `p/q` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn value(&self) -> Result<Rational, GroupError> {
        match self {
            Entry::Int(v) => Ok(Rational::from_integer((*v).into())),
            Entry::Text(s) => parse_rational(s)
                .ok_or_else(|| GroupError::InvalidRepresentation(format!("bad rational '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientField {
    pub kind: String,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorField {
    pub name: String,
    pub matrix: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<Entry>>,
}

/// On-disk representation file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationFile {
    pub ambient: AmbientField,
    pub generators: Vec<GeneratorField>,
    #[serde(default = "default_true")]
    pub symmetric_closure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant_form: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assume_zariski_dense: Option<bool>,
}

fn default_true() -> bool {
    true
}

const MAX_FILE_MATRIX: usize = 64;

fn read_matrix(rows: &[Vec<Entry>], what: &str) -> Result<RatMatrix, GroupError> {
    let r = rows.len();
    if r == 0 || r > MAX_FILE_MATRIX || rows.iter().any(|row| row.len() != r) {
        return Err(GroupError::InvalidRepresentation(format!("{what}: expected a square matrix")));
    }
    let data = rows.iter().flatten().map(Entry::value).collect::<Result<Vec<_>, _>>()?;
    Ok(RatMatrix::from_vec(r, r, data))
}

impl RepresentationFile {
    pub fn into_spec(self) -> Result<RepresentationSpec, GroupError> {
        let ambient = AmbientGroup::from_kind(&self.ambient.kind, self.ambient.n).ok_or_else(|| {
            GroupError::InvalidRepresentation(format!(
                "unknown ambient kind '{}' (n = {})",
                self.ambient.kind, self.ambient.n
            ))
        })?;
        if ambient.matrix_size() > MAX_FILE_MATRIX {
            return Err(GroupError::InvalidRepresentation("ambient too large".into()));
        }
        let size = ambient.matrix_size();
        let mut gens = Vec::new();
        for g in &self.generators {
            let m = read_matrix(&g.matrix, &g.name)?;
            let full = match (&ambient, &g.translation) {
                (AmbientGroup::AffineSpecialLinear(n), Some(t)) => {
                    if m.rows() != *n || t.len() != *n {
                        return Err(GroupError::InvalidRepresentation(format!(
                            "generator '{}': linear part must be {n}×{n} with a translation of length {n}",
                            g.name
                        )));
                    }
                    let mut full = RatMatrix::identity(n + 1);
                    for i in 0..*n {
                        for j in 0..*n {
                            full[(i, j)] = m[(i, j)].clone();
                        }
                        full[(i, *n)] = t[i].value()?;
                    }
                    full
                }
                (_, Some(_)) => {
                    return Err(GroupError::InvalidRepresentation(format!(
                        "generator '{}': translation given for a non-affine ambient",
                        g.name
                    )))
                }
                (_, None) => m,
            };
            if full.rows() != size {
                return Err(GroupError::InvalidRepresentation(format!(
                    "generator '{}': expected a {size}×{size} matrix",
                    g.name
                )));
            }
            gens.push((g.name.clone(), full));
        }
        let mut spec = RepresentationSpec::new(Arc::new(ambient), gens)?;
        spec.symmetric_closure = self.symmetric_closure;
        if let Some(f) = &self.invariant_form {
            spec.invariant_form = Some(read_matrix(f, "invariant_form")?);
        }
        spec.assume_zariski_dense = self.assume_zariski_dense.unwrap_or(false);
        Ok(spec)
    }
}
