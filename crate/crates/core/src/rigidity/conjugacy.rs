//! Recovery of conjugating matrices and translations between two
//! representations from the linear equations `ρ₁(s)·W = W·ρ₂(s)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::compare::aligned;
use super::RigidityError;
use crate::groups::RepresentationSpec;
use crate::matrix::{format_rational, Matrix, RatMatrix, Rational};
use crate::poly::{vars, Polynomial};
use crate::variety::symbolic_det;

/// Relative singular-value threshold for numeric rank decisions.
pub const RANK_THRESHOLD: f64 = 1e-10;
/// Deterministic seeds tried when sampling the solution space.
pub const SAMPLE_SEEDS: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "numeric" => Ok(Mode::Numeric),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Numeric => "numeric",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Linear,
    AffineTranslation,
    AffineGeneral,
}

/// Automorphism applied to the second representation before solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Automorphism {
    Identity,
    /// `g ↦ (gᵀ)⁻¹`.
    Contragredient,
}

impl Automorphism {
    pub const CATALOG: [Automorphism; 2] = [Automorphism::Identity, Automorphism::Contragredient];

    pub fn apply(self, g: &RatMatrix) -> RatMatrix {
        match self {
            Automorphism::Identity => g.clone(),
            Automorphism::Contragredient => g.transpose().inverse().expect("group elements are invertible"),
        }
    }
}

/// `W` with `W⁻¹ρ₁(s)W = σ(ρ₂(s))` for every generator `s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugacyCertificate {
    pub kind: CertificateKind,
    pub automorphism: Automorphism,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<RatMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<Vec<Vec<f64>>>,
    /// For translation certificates, the translation `X` in `(I, X)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<String>>,
    /// `max_s ‖ρ₁(s)W − Wσ(ρ₂(s))‖ / (‖ρ₁(s)‖·‖W‖)` in Frobenius norms.
    pub residual: f64,
}

impl ConjugacyCertificate {
    pub fn witness_f64(&self) -> DMatrix<f64> {
        match (&self.exact, &self.numeric) {
            (Some(m), _) => m.to_nalgebra(),
            (None, Some(rows)) => DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j]),
            _ => unreachable!("certificates carry a witness"),
        }
    }

    /// Recomputes the residual by direct multiplication on the generators.
    /// Exact witnesses give exactly zero when valid.
    pub fn verify(&self, rep1: &RepresentationSpec, rep2: &RepresentationSpec) -> Result<f64, RigidityError> {
        let pairs = aligned(rep1, rep2)?;
        if let Some(w) = &self.exact {
            let exact_ok = pairs
                .iter()
                .all(|(a, b)| a.mul(w) == w.mul(&self.automorphism.apply(b)));
            if exact_ok {
                return Ok(0.0);
            }
        }
        let w = self.witness_f64();
        Ok(float_residual(&pairs, &w, self.automorphism))
    }
}

fn float_residual(pairs: &[(RatMatrix, RatMatrix)], w: &DMatrix<f64>, sigma: Automorphism) -> f64 {
    pairs
        .iter()
        .map(|(a, b)| {
            let af = a.to_nalgebra();
            let bf = sigma.apply(b).to_nalgebra();
            (&af * w - w * &bf).norm() / (af.norm() * w.norm()).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Rows of `A·W − W·B = 0` in the row-major entries of `W`.
fn intertwiner_system(pairs: &[(RatMatrix, RatMatrix)], extra: &[(usize, usize)]) -> RatMatrix {
    let n = pairs[0].0.rows();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (a, b) in pairs {
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![Rational::zero(); n * n];
                for l in 0..n {
                    row[l * n + j] += &a[(i, l)];
                    row[i * n + l] -= &b[(l, j)];
                }
                rows.push(row);
            }
        }
    }
    for &(i, j) in extra {
        let mut row = vec![Rational::zero(); n * n];
        row[i * n + j] = Rational::one();
        rows.push(row);
    }
    RatMatrix::from_rows(rows)
}

fn combination(basis: &[Vec<Rational>], coeffs: &[Rational], n: usize) -> RatMatrix {
    let mut data = vec![Rational::zero(); n * n];
    for (v, c) in basis.iter().zip(coeffs) {
        for (d, x) in data.iter_mut().zip(v) {
            *d += x * c;
        }
    }
    Matrix::from_vec(n, n, data)
}

/// First nonzero entry (row-major) becomes one.
fn normalize_exact(w: RatMatrix) -> RatMatrix {
    let lead = w.data().iter().find(|x| !x.is_zero()).cloned().expect("nonzero witness");
    w.scale(&lead.recip())
}

/// An invertible element of the span of `basis`, or `None` when the
/// determinant vanishes identically on the span (decided symbolically).
fn invertible_in_span(basis: &[Vec<Rational>], n: usize) -> Option<RatMatrix> {
    if basis.is_empty() {
        return None;
    }
    for v in basis {
        let w = Matrix::from_vec(n, n, v.clone());
        if !w.det().is_zero() {
            return Some(w);
        }
    }
    let sample = |rng: &mut ChaCha8Rng, range: i64| -> Vec<Rational> {
        (0..basis.len()).map(|_| Rational::from_integer(rng.gen_range(-range..=range).into())).collect()
    };
    for seed in 0..SAMPLE_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = combination(basis, &sample(&mut rng, 16), n);
        if !w.det().is_zero() {
            return Some(w);
        }
    }
    // all samples singular: decide with the determinant polynomial
    let names: Vec<String> = (1..=basis.len()).map(|k| format!("c_{k}")).collect();
    let v = vars(&names);
    let entries: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    basis.iter().enumerate().fold(Polynomial::zero(v.clone()), |acc, (k, b)| {
                        acc.add(&Polynomial::var(v.clone(), k).scale(&b[i * n + j]))
                    })
                })
                .collect()
        })
        .collect();
    if symbolic_det(&entries, &v).is_zero() {
        return None;
    }
    // a nonzero polynomial of degree n misses a random point of a large box
    // with probability at most n / (2·2^20 + 1) per try
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEEDS);
    loop {
        let w = combination(basis, &sample(&mut rng, 1 << 20), n);
        if !w.det().is_zero() {
            return Some(w);
        }
    }
}

fn numeric_nullspace(system: &RatMatrix) -> Result<Vec<Vec<f64>>, RigidityError> {
    let m = system.to_nalgebra();
    let cols = m.ncols();
    // pad to at least square so that every right singular vector is present
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(&m);
        p
    } else {
        m
    };
    let svd = padded
        .try_svd(false, true, f64::EPSILON, 10_000)
        .ok_or_else(|| RigidityError::PrecisionLoss("singular value iteration did not converge".into()))?;
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let cut = RANK_THRESHOLD * smax.max(f64::MIN_POSITIVE);
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cut)
        .map(|(k, _)| vt.row(k).iter().copied().collect())
        .collect())
}

fn numeric_invertible(basis: &[Vec<f64>], n: usize) -> Option<DMatrix<f64>> {
    if basis.is_empty() {
        return None;
    }
    for seed in 0..SAMPLE_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = DMatrix::zeros(n, n);
        for v in basis {
            let c: f64 = rng.gen_range(-1.0..1.0);
            for i in 0..n {
                for j in 0..n {
                    w[(i, j)] += c * v[i * n + j];
                }
            }
        }
        let s = w.singular_values();
        if s.min() > RANK_THRESHOLD * s.max() {
            return Some(w);
        }
    }
    None
}

/// Scales to `|det| = 1` and makes the first significant entry positive.
fn normalize_numeric(mut w: DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows() as f64;
    let d = w.determinant().abs();
    w /= d.powf(1.0 / n);
    let big = w.amax();
    if let Some(x) = w.transpose().iter().find(|x| x.abs() > 1e-9 * big) {
        if *x < 0.0 {
            w.neg_mut();
        }
    }
    w
}

fn rows_of(w: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..w.nrows()).map(|i| w.row(i).iter().copied().collect()).collect()
}

fn solve_kind(
    pairs: &[(RatMatrix, RatMatrix)],
    kind: CertificateKind,
    mode: Mode,
    tol: f64,
) -> Result<Option<ConjugacyCertificate>, RigidityError> {
    let n = pairs[0].0.rows();
    // affine conjugators have last row (0, …, 0, c)
    let extra: Vec<(usize, usize)> =
        if kind == CertificateKind::AffineGeneral { (0..n - 1).map(|j| (n - 1, j)).collect() } else { vec![] };
    for sigma in Automorphism::CATALOG {
        if kind == CertificateKind::AffineGeneral && sigma == Automorphism::Contragredient {
            // the contragredient of an affine embedding is not affine
            continue;
        }
        let twisted: Vec<(RatMatrix, RatMatrix)> =
            pairs.iter().map(|(a, b)| (a.clone(), sigma.apply(b))).collect();
        let system = intertwiner_system(&twisted, &extra);
        match mode {
            Mode::Exact => {
                let basis = system.nullspace();
                if let Some(w) = invertible_in_span(&basis, n) {
                    let w = if kind == CertificateKind::AffineGeneral {
                        let c = w[(n - 1, n - 1)].clone();
                        w.scale(&c.recip())
                    } else {
                        normalize_exact(w)
                    };
                    let exact_ok = twisted.iter().all(|(a, b)| a.mul(&w) == w.mul(b));
                    debug_assert!(exact_ok);
                    let residual = if exact_ok { 0.0 } else { float_residual(pairs, &w.to_nalgebra(), sigma) };
                    return Ok(Some(ConjugacyCertificate {
                        kind,
                        automorphism: sigma,
                        mode,
                        exact: Some(w),
                        numeric: None,
                        translation: None,
                        residual,
                    }));
                }
            }
            Mode::Numeric => {
                let basis = numeric_nullspace(&system)?;
                if let Some(w) = numeric_invertible(&basis, n) {
                    let w = if kind == CertificateKind::AffineGeneral {
                        let c = w[(n - 1, n - 1)];
                        w / c
                    } else {
                        normalize_numeric(w)
                    };
                    let residual = float_residual(pairs, &w, sigma);
                    if residual <= tol {
                        return Ok(Some(ConjugacyCertificate {
                            kind,
                            automorphism: sigma,
                            mode,
                            exact: None,
                            numeric: Some(rows_of(&w)),
                            translation: None,
                            residual,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Invertible `C` with `C⁻¹ρ₁(s)C = σ(ρ₂(s))`, trying the automorphism
/// catalog in order.
pub fn recover_linear_conjugacy(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    mode: Mode,
    tol: f64,
) -> Result<Option<ConjugacyCertificate>, RigidityError> {
    if rep1.ambient.matrix_size() != rep2.ambient.matrix_size() {
        return Err(RigidityError::Domain("representations have different matrix sizes".into()));
    }
    solve_kind(&aligned(rep1, rep2)?, CertificateKind::Linear, mode, tol)
}

/// Affine conjugator `(A, X)` between two affine representations.
pub fn recover_affine_general(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    mode: Mode,
    tol: f64,
) -> Result<Option<ConjugacyCertificate>, RigidityError> {
    if !(rep1.is_affine() && rep2.is_affine()) || rep1.ambient != rep2.ambient {
        return Err(RigidityError::Domain("affine recovery needs two affine representations of one size".into()));
    }
    solve_kind(&aligned(rep1, rep2)?, CertificateKind::AffineGeneral, mode, tol)
}

/// Translation `X` with `(I, X)⁻¹ρ₁(I, X) = ρ₂`, i.e. `(I − R_s)X = T₁(s) − T₂(s)`
/// for every generator, when the linear parts agree.
pub fn recover_affine_translation(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    mode: Mode,
    tol: f64,
) -> Result<Option<ConjugacyCertificate>, RigidityError> {
    if !(rep1.is_affine() && rep2.is_affine()) || rep1.ambient != rep2.ambient {
        return Err(RigidityError::Domain("translation recovery needs two affine representations of one size".into()));
    }
    let pairs = aligned(rep1, rep2)?;
    let n = rep1.ambient.n();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (a, b) in &pairs {
        if a.submatrix(0, 0, n, n) != b.submatrix(0, 0, n, n) {
            return Err(RigidityError::Domain("linear parts differ".into()));
        }
        for i in 0..n {
            rows.push(
                (0..n)
                    .map(|j| {
                        let id = if i == j { Rational::one() } else { Rational::zero() };
                        id - &a[(i, j)]
                    })
                    .collect::<Vec<_>>(),
            );
            rhs.push(&a[(i, n)] - &b[(i, n)]);
        }
    }
    let system = RatMatrix::from_rows(rows);
    let x = match mode {
        Mode::Exact => system.solve(&rhs),
        Mode::Numeric => {
            let m = system.to_nalgebra();
            let r = nalgebra::DVector::from_iterator(rhs.len(), rhs.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)));
            let svd = m.svd(true, true);
            let sol = svd
                .solve(&r, RANK_THRESHOLD * svd.singular_values.max())
                .map_err(|e| RigidityError::PrecisionLoss(e.to_string()))?;
            let scale = r.amax().max(1.0);
            if (system.to_nalgebra() * &sol - &r).amax() > tol * scale {
                None
            } else {
                let mut w = DMatrix::identity(n + 1, n + 1);
                for i in 0..n {
                    w[(i, n)] = sol[i];
                }
                let residual = float_residual(&pairs, &w, Automorphism::Identity);
                return Ok((residual <= tol).then(|| ConjugacyCertificate {
                    kind: CertificateKind::AffineTranslation,
                    automorphism: Automorphism::Identity,
                    mode,
                    exact: None,
                    numeric: Some(rows_of(&w)),
                    translation: Some(sol.iter().map(|v| format!("{v}")).collect()),
                    residual,
                }));
            }
        }
    };
    let Some(x) = x else { return Ok(None) };
    let mut w = RatMatrix::identity(n + 1);
    for i in 0..n {
        w[(i, n)] = x[i].clone();
    }
    let exact_ok = pairs.iter().all(|(a, b)| a.mul(&w) == w.mul(b));
    Ok(Some(ConjugacyCertificate {
        kind: CertificateKind::AffineTranslation,
        automorphism: Automorphism::Identity,
        mode,
        translation: Some(x.iter().map(format_rational).collect()),
        residual: if exact_ok { 0.0 } else { float_residual(&pairs, &w.to_nalgebra(), Automorphism::Identity) },
        exact: Some(w),
        numeric: None,
    }))
}
