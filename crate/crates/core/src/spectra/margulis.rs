//! Neutral-direction translation invariant of loxodromic affine elements,
//! computed from an eigenbasis and, independently, from the polynomial
//! `P_A(I − A) X`.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::wedge::{bilinear, p_coefficients, r_vector, wedge_traces, shifted};
use super::{eigenvalues, jordan, SpectraError};
use crate::groups::AffineElement;
use crate::matrix::{rational_serde, Matrix, RatMatrix, Rational};

/// Dimension of the zero-weight (neutral) space of the representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Weights {
    pub zero_dim: usize,
}

impl Weights {
    /// Dimension of the fixed space of `a`.
    pub fn infer(a: &RatMatrix) -> Self {
        Weights { zero_dim: shifted(a).nullspace().len() }
    }

    /// Irreducible `n`-dimensional representation of `SL(2)`.
    pub fn symmetric_power(n: usize) -> Self {
        Weights { zero_dim: n % 2 }
    }
}

/// Exact rational data of the polynomial path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactMargulis {
    /// Ascending coefficients of `P_A`.
    #[serde(serialize_with = "rational_serde::many")]
    pub p_coefficients: Vec<Rational>,
    #[serde(serialize_with = "rational_serde::one")]
    pub p_at_zero: Rational,
    /// `P_A(I − A) X`.
    #[serde(serialize_with = "rational_serde::many")]
    pub r: Vec<Rational>,
    /// Projection of `X` to the fixed space along the other eigenspaces.
    #[serde(serialize_with = "rational_serde::many")]
    pub neutral: Vec<Rational>,
    /// Invariant in coordinates, available when the linear part is diagonal.
    #[serde(serialize_with = "rational_serde::optional")]
    pub vector: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MargulisInvariant {
    /// Coordinates in the conjugator's basis; nonzero only at neutral slots.
    pub vector: Vec<f64>,
    pub norm: f64,
    /// Columns of the conjugator `h`, sorted by decreasing eigenvalue modulus.
    pub h_columns: Vec<Vec<f64>>,
    pub neutral_slots: Vec<usize>,
    pub p_at_zero: f64,
    /// `‖P_A(I−A)X − P_A(0)·h·M‖ / ‖P_A(0)·h·M‖`; only meaningful when the
    /// invariant is nonzero, absolute when `M = 0` in floating point.
    pub identity_residual: f64,
    /// An eigenvalue near `−1` was placed in the non-neutral part.
    pub minus_one_flag: bool,
}

fn check_structure(a: &RatMatrix, weights: &Weights) -> Result<usize, SpectraError> {
    let n = a.rows();
    if weights.zero_dim > n {
        return Err(SpectraError::Domain(format!("neutral dimension {} exceeds {n}", weights.zero_dim)));
    }
    let d = n - weights.zero_dim;
    let e = wedge_traces(&shifted(a));
    if e[d].is_zero() || e[d + 1..].iter().any(|x| !x.is_zero()) {
        return Err(SpectraError::Degenerate(format!(
            "eigenvalue 1 does not have multiplicity {} (P_A(0) would vanish)",
            weights.zero_dim
        )));
    }
    if shifted(a).nullspace().len() != weights.zero_dim {
        return Err(SpectraError::Degenerate("fixed space is not semisimple".into()));
    }
    Ok(d)
}

/// Exact polynomial path; no eigenvectors are formed.
pub fn margulis_invariant_exact(e: &AffineElement, weights: &Weights) -> Result<ExactMargulis, SpectraError> {
    let a = e.linear().matrix();
    let d = check_structure(a, weights)?;
    let p = p_coefficients(a, d);
    let p0 = p[0].clone();
    let r = r_vector(a, e.translation(), d);
    let neutral: Vec<Rational> = r.iter().map(|x| x / &p0).collect();
    let vector = diagonal_order(a).map(|perm| perm.iter().map(|&i| neutral[i].clone()).collect());
    Ok(ExactMargulis { p_coefficients: p, p_at_zero: p0, r, neutral, vector })
}

/// For a diagonal matrix, the coordinate order that sorts the diagonal by
/// decreasing modulus (stable).
fn diagonal_order(a: &RatMatrix) -> Option<Vec<usize>> {
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if i != j && !a[(i, j)].is_zero() {
                return None;
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(j, j)].abs().cmp(&a[(i, i)].abs()));
    Some(idx)
}

fn floats(v: &[Rational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn form_value(q: Option<&DMatrix<f64>>, v: &DVector<f64>) -> f64 {
    match q {
        Some(q) => v.dot(&(q * v)),
        None => v.dot(v),
    }
}

fn normalize_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-9 * scale) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

/// Unit vector spanning the kernel of `m`, from the smallest singular value.
fn kernel_vector(m: &DMatrix<f64>) -> Result<DVector<f64>, SpectraError> {
    let svd = m
        .clone()
        .try_svd(false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| SpectraError::PrecisionLoss("eigenvector iteration did not converge".into()))?;
    let vt = svd.v_t.expect("requested");
    let k = svd.singular_values.imin();
    Ok(vt.row(k).transpose())
}

/// Gram–Schmidt on exact kernel vectors.
fn orthonormal(vs: &[Vec<Rational>]) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut w = DVector::from_vec(floats(v));
        for u in &out {
            w -= u * u.dot(&w);
        }
        let nrm = w.norm();
        out.push(w / nrm);
    }
    out
}

/// Invariant from an explicit eigenbasis `h`: columns are eigenvectors in
/// order of decreasing modulus, the neutral block sitting where modulus one
/// falls; `M = π₀(h⁻¹X)`. A one-dimensional neutral column is scaled to
/// unit length for the invariant form when that form is nondegenerate on it.
pub fn margulis_invariant(
    e: &AffineElement,
    weights: &Weights,
    form: Option<&RatMatrix>,
) -> Result<MargulisInvariant, SpectraError> {
    let a = e.linear().matrix();
    let n = a.rows();
    let d = check_structure(a, weights)?;
    let j = jordan(a)?;
    if !j.is_loxodromic_with_neutral(weights.zero_dim) {
        return Err(SpectraError::NotLoxodromic { gap: j.gap });
    }
    let af = super::to_float(a)?;
    let qf = form.map(|q| q.to_nalgebra());

    // non-neutral eigenvalues: drop the ones closest to 1
    let mut eig = eigenvalues(&af)?;
    eig.sort_by(|x, y| (x - 1.0).norm().total_cmp(&(y - 1.0).norm()));
    let mut rest: Vec<_> = eig.split_off(weights.zero_dim);
    for z in &rest {
        if z.im.abs() > 1e-9 * z.norm().max(1.0) {
            return Err(SpectraError::NotLoxodromic { gap: 0.0 });
        }
    }
    rest.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    let minus_one_flag = rest.iter().any(|z| (z.re + 1.0).abs() < 1e-7);

    let above = rest.iter().filter(|z| z.norm() > 1.0).count();
    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(n);
    for z in &rest[..above] {
        columns.push(eigencolumn(&af, z.re)?);
    }
    let neutral_slots: Vec<usize> = (above..above + weights.zero_dim).collect();
    let mut neutral_basis = orthonormal(&shifted(a).nullspace());
    if let [v] = neutral_basis.as_mut_slice() {
        let qv = form_value(qf.as_ref(), v);
        if qv.abs() > 1e-12 {
            *v /= qv.abs().sqrt();
        }
        normalize_sign(v);
    }
    columns.extend(neutral_basis);
    for z in &rest[above..] {
        columns.push(eigencolumn(&af, z.re)?);
    }
    let h = DMatrix::from_columns(&columns);
    let x = DVector::from_vec(floats(e.translation()));
    let y = h
        .clone()
        .lu()
        .solve(&x)
        .ok_or_else(|| SpectraError::PrecisionLoss("eigenbasis is numerically singular".into()))?;
    let mut m = DVector::zeros(n);
    for &s in &neutral_slots {
        m[s] = y[s];
    }
    let w = &h * &m;

    let p = p_coefficients(a, d);
    let p0 = p[0].to_f64().unwrap_or(f64::NAN);
    let u = DVector::from_vec(floats(&r_vector(a, e.translation(), d)));
    let target = &w * p0;
    let diff = (&u - &target).norm();
    let identity_residual = if target.norm() > 0.0 { diff / target.norm() } else { diff };
    let norm = form_value(qf.as_ref(), &w).abs().sqrt();
    Ok(MargulisInvariant {
        vector: m.iter().copied().collect(),
        norm,
        h_columns: columns.iter().map(|c| c.iter().copied().collect()).collect(),
        neutral_slots,
        p_at_zero: p0,
        identity_residual,
        minus_one_flag,
    })
}

fn eigencolumn(a: &DMatrix<f64>, mu: f64) -> Result<DVector<f64>, SpectraError> {
    let n = a.nrows();
    let mut v = kernel_vector(&(a - DMatrix::identity(n, n) * mu))?;
    normalize_sign(&mut v);
    Ok(v)
}

/// `‖P_A(I−A)X‖ / |P_A(0)|` for the invariant form (Euclidean when absent),
/// after checking that the linear part preserves it exactly.
pub fn margulis_norm(e: &AffineElement, form: Option<&RatMatrix>) -> Result<f64, SpectraError> {
    let a = e.linear().matrix();
    let n = a.rows();
    let q = form.cloned().unwrap_or_else(|| Matrix::identity(n));
    if q.rows() != n || q.cols() != n {
        return Err(SpectraError::Domain(format!("form has size {}, expected {n}", q.rows())));
    }
    if a.transpose().mul(&q).mul(a) != q {
        return Err(SpectraError::NormViolation(if form.is_some() {
            "linear part does not preserve the invariant form".into()
        } else {
            "linear part is not orthogonal for the Euclidean norm".into()
        }));
    }
    let weights = Weights::infer(a);
    let d = check_structure(a, &weights)?;
    let p0 = p_coefficients(a, d)[0].clone();
    let u = r_vector(a, e.translation(), d);
    let ratio = bilinear(&q, &u, &u) / (&p0 * &p0);
    Ok(ratio.abs().to_f64().unwrap_or(f64::NAN).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::fixtures;
    use crate::matrix::{rat, ratio};

    #[test]
    fn diagonal_fixture_is_middle_coordinate() {
        let e = fixtures::diagonal_affine(4, [5, 7, -3]);
        let ex = margulis_invariant_exact(&e, &Weights { zero_dim: 1 }).unwrap();
        assert_eq!(ex.vector, Some(vec![rat(0), rat(7), rat(0)]));
        assert_eq!(ex.p_at_zero, ratio(-9, 4));
        let q = fixtures::antidiagonal_form(3);
        let fl = margulis_invariant(&e, &Weights { zero_dim: 1 }, Some(&q)).unwrap();
        assert!((fl.vector[1] - 7.0).abs() < 1e-9);
        assert!(fl.identity_residual < 1e-10);
        assert!((margulis_norm(&e, Some(&q)).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn unit_neutral_translation_has_unit_norm() {
        let e = fixtures::diagonal_affine(4, [0, 1, 0]);
        let q = fixtures::antidiagonal_form(3);
        assert_eq!(margulis_norm(&e, Some(&q)).unwrap(), 1.0);
        let zero = fixtures::diagonal_affine(4, [0, 0, 0]);
        assert_eq!(margulis_norm(&zero, Some(&q)).unwrap(), 0.0);
    }

    #[test]
    fn coboundary_vanishes() {
        let e = fixtures::diagonal_affine(4, [0, 0, 0]);
        let y = [rat(2), rat(-5), ratio(1, 3)];
        let a = e.linear().matrix();
        let x: Vec<Rational> = shifted(a).mul_vec(&y);
        let cob = AffineElement::new(e.linear().clone(), x).unwrap();
        let ex = margulis_invariant_exact(&cob, &Weights { zero_dim: 1 }).unwrap();
        assert!(ex.r.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn euclidean_default_needs_orthogonality() {
        let e = fixtures::diagonal_affine(4, [1, 1, 1]);
        assert!(matches!(margulis_norm(&e, None), Err(SpectraError::NormViolation(_))));
    }

    #[test]
    fn dual_paths_agree_on_so21_generators() {
        let rep = fixtures::affine_so21(&[3, -2]);
        let q = rep.invariant_form.clone().unwrap();
        for e in rep.affine_generators().unwrap() {
            let m = margulis_invariant(&e, &Weights { zero_dim: 1 }, Some(&q)).unwrap();
            let n = margulis_norm(&e, Some(&q)).unwrap();
            assert!((m.norm - n).abs() <= 1e-8 * n.max(1.0), "{} vs {}", m.norm, n);
            assert!(m.identity_residual < 1e-8);
        }
    }

    #[test]
    fn wrong_neutral_dimension_is_degenerate() {
        let e = fixtures::diagonal_affine(4, [1, 1, 1]);
        assert!(matches!(
            margulis_invariant_exact(&e, &Weights { zero_dim: 0 }),
            Err(SpectraError::Degenerate(_))
        ));
    }
}
