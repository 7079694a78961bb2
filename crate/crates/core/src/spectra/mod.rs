//! Spectral invariants of matrix group elements: log singular values,
//! log eigenvalue moduli, exterior-power traces, translation invariants of
//! affine elements, and the polynomial functionals whose zero sets encode
//! equality of these invariants.

mod functionals;
mod margulis;
mod roots;
mod table;
mod wedge;

use nalgebra::{Complex, DMatrix};
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::groups::GroupError;
use crate::matrix::RatMatrix;

pub use functionals::{
    cartan_functional, e_functional, r_functional, r_norm_squared, trace_square_functional,
};
pub use margulis::{
    margulis_invariant, margulis_invariant_exact, margulis_norm, ExactMargulis, MargulisInvariant,
    Weights,
};
pub use table::{evaluate_invariant, spectrum_table, Invariant, SpectrumRow, SpectrumTable};
pub use wedge::{apply_polynomial, bilinear, p_coefficients, r_vector, shifted, wedge_traces};

/// Minimal gap between consecutive log moduli for loxodromy.
pub const GAP_TOL: f64 = 1e-8;

/// Entries above this magnitude are not trusted in double precision.
const FLOAT_RANGE: f64 = 1e150;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("element is not loxodromic (minimal gap {gap:e})")]
    NotLoxodromic { gap: f64 },
    #[error("degenerate invariant: {0}")]
    Degenerate(String),
    #[error("norm violation: {0}")]
    NormViolation(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Sorted log singular values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanVector {
    pub entries: Vec<f64>,
}

/// Sorted log eigenvalue moduli and their smallest consecutive gap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JordanVector {
    pub entries: Vec<f64>,
    pub gap: f64,
}

impl JordanVector {
    fn new(mut entries: Vec<f64>) -> Self {
        entries.sort_by(|a, b| b.total_cmp(a));
        let gap = entries.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        JordanVector { entries, gap }
    }

    pub fn is_loxodromic(&self) -> bool {
        self.gap > GAP_TOL
    }

    /// Loxodromy allowing a neutral block of the given dimension: entries
    /// at zero collapse to one before the gaps are measured.
    pub fn is_loxodromic_with_neutral(&self, zero_dim: usize) -> bool {
        if zero_dim <= 1 {
            return self.is_loxodromic();
        }
        let near_zero = |x: &f64| x.abs() <= 1e-6;
        if self.entries.iter().filter(|x| near_zero(x)).count() < zero_dim {
            return false;
        }
        let mut skipped = 0;
        let kept: Vec<f64> = self
            .entries
            .iter()
            .copied()
            .filter(|x| {
                let drop = near_zero(x) && skipped + 1 < zero_dim;
                skipped += drop as usize;
                !drop
            })
            .collect();
        JordanVector::new(kept).is_loxodromic()
    }
}

pub(crate) fn to_float(m: &RatMatrix) -> Result<DMatrix<f64>, SpectraError> {
    let big = m.max_abs_f64();
    if !big.is_finite() || big > FLOAT_RANGE {
        return Err(SpectraError::PrecisionLoss(format!(
            "matrix entries of magnitude {big:e} exceed double precision range"
        )));
    }
    Ok(m.to_nalgebra())
}

fn singular_values_desc(m: &DMatrix<f64>) -> Result<Vec<f64>, SpectraError> {
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| SpectraError::PrecisionLoss("singular value iteration did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub(crate) fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>, SpectraError> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| SpectraError::PrecisionLoss("eigenvalue iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

fn moduli_desc(m: &DMatrix<f64>) -> Result<Vec<f64>, SpectraError> {
    let mut v: Vec<f64> = eigenvalues(m)?.iter().map(|z| z.norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// Large values are read from `g`, small ones as reciprocals of the large
/// values of `g⁻¹`, where each is accurate.
fn merge_logs(direct: &[f64], inverse: &[f64]) -> Result<Vec<f64>, SpectraError> {
    let n = direct.len();
    let out: Vec<f64> = (0..n)
        .map(|i| if direct[i] >= 1.0 { direct[i].ln() } else { -inverse[n - 1 - i].ln() })
        .collect();
    if out.iter().any(|x| !x.is_finite()) {
        return Err(SpectraError::PrecisionLoss("non-finite logarithm".into()));
    }
    Ok(out)
}

fn square_inverse(g: &RatMatrix) -> Result<RatMatrix, SpectraError> {
    if !g.is_square() {
        return Err(SpectraError::Domain("matrix is not square".into()));
    }
    g.inverse().ok_or_else(|| SpectraError::Domain("matrix is singular".into()))
}

pub fn cartan(g: &RatMatrix) -> Result<CartanVector, SpectraError> {
    let inv = square_inverse(g)?;
    let s = singular_values_desc(&to_float(g)?)?;
    let t = singular_values_desc(&to_float(&inv)?)?;
    let mut entries = merge_logs(&s, &t)?;
    entries.sort_by(|a, b| b.total_cmp(a));
    Ok(CartanVector { entries })
}

/// Cartan projection of a floating-point matrix, without the inverse
/// refinement.
pub fn cartan_f64(m: &DMatrix<f64>) -> Result<CartanVector, SpectraError> {
    let s = singular_values_desc(m)?;
    if s.iter().any(|x| *x <= 0.0) {
        return Err(SpectraError::PrecisionLoss("numerically singular matrix".into()));
    }
    Ok(CartanVector { entries: s.iter().map(|x| x.ln()).collect() })
}

/// Ascending coefficients of `det(xI − g)` rounded from the exact values.
fn char_poly_f64(g: &RatMatrix) -> Option<Vec<f64>> {
    let n = g.rows();
    let e = wedge_traces(g);
    let c: Vec<f64> = (0..=n)
        .map(|j| {
            let v = e[n - j].to_f64().unwrap_or(f64::NAN);
            if (n - j) % 2 == 0 { v } else { -v }
        })
        .collect();
    c.iter().all(|x| x.is_finite()).then_some(c)
}

/// Newton steps on the exactly known characteristic polynomial, kept only
/// while the residual decreases. Removes the `‖g‖·ε` error of the
/// eigenvalue iteration for simple roots.
fn polish_root(p: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let (mut v, mut d) = roots::horner(p, z);
    for _ in 0..30 {
        if v.norm() == 0.0 || d.norm() == 0.0 {
            break;
        }
        let next = z - v / d;
        let (nv, nd) = roots::horner(p, next);
        if !(nv.norm() < v.norm()) {
            break;
        }
        (z, v, d) = (next, nv, nd);
    }
    z
}

fn polished_moduli_desc(g: &RatMatrix) -> Result<Vec<f64>, SpectraError> {
    let mut z = eigenvalues(&to_float(g)?)?;
    if let Some(p) = char_poly_f64(g) {
        for r in &mut z {
            *r = polish_root(&p, *r);
        }
    }
    let mut v: Vec<f64> = z.iter().map(|z| z.norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

pub fn jordan(g: &RatMatrix) -> Result<JordanVector, SpectraError> {
    let inv = square_inverse(g)?;
    if let Some(m) = roots::exact_moduli_desc(g) {
        return Ok(JordanVector::new(m.iter().map(|x| x.ln()).collect()));
    }
    let m = polished_moduli_desc(g)?;
    let mi = polished_moduli_desc(&inv)?;
    Ok(JordanVector::new(merge_logs(&m, &mi)?))
}

pub fn jordan_f64(m: &DMatrix<f64>) -> Result<JordanVector, SpectraError> {
    let v = moduli_desc(m)?;
    if v.iter().any(|x| *x <= 0.0) {
        return Err(SpectraError::PrecisionLoss("numerically singular matrix".into()));
    }
    Ok(JordanVector::new(v.iter().map(|x| x.ln()).collect()))
}
