//! Exact matrix groups: elements, embeddings, word balls and representations.

mod ball;
pub mod fixtures;
mod rep;

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::matrix::{RatMatrix, Rational};
pub use crate::variety::AmbientGroup;

pub use ball::{format_word, Alphabet, BallLimits, BallWalker, Coincidence, Word, WordBall};
pub use rep::{ball, ball_with_limits, Generator, RepresentationFile, RepresentationSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not an element of {ambient}")]
    NotInAmbient { ambient: String },
    #[error("generator set is not symmetric: missing inverse of '{0}'")]
    NotSymmetric(String),
    #[error("enumeration aborted at radius {radius_reached} with {entries} entries: {reason}")]
    EnumerationAborted { radius_reached: usize, entries: usize, reason: String },
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
}

/// Invertible exact matrix accepted by an ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    matrix: RatMatrix,
    ambient: Arc<AmbientGroup>,
}

impl GroupElement {
    pub fn new(ambient: Arc<AmbientGroup>, matrix: RatMatrix) -> Result<Self, GroupError> {
        if !ambient.contains(&matrix) {
            return Err(GroupError::NotInAmbient { ambient: ambient.to_string() });
        }
        Ok(GroupElement { matrix, ambient })
    }

    pub fn sl(matrix: RatMatrix) -> Result<Self, GroupError> {
        let n = matrix.rows();
        Self::new(Arc::new(AmbientGroup::SpecialLinear(n)), matrix)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, GroupError> {
        Self::sl(RatMatrix::from_i64_rows(rows))
    }

    pub fn identity(ambient: Arc<AmbientGroup>) -> Self {
        let n = ambient.matrix_size();
        GroupElement { matrix: RatMatrix::identity(n), ambient }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RatMatrix {
        self.matrix
    }

    pub fn ambient(&self) -> &Arc<AmbientGroup> {
        &self.ambient
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.ambient, other.ambient, "elements of different ambient groups");
        GroupElement { matrix: self.matrix.mul(&other.matrix), ambient: self.ambient.clone() }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            matrix: self.matrix.inverse().expect("group elements are invertible"),
            ambient: self.ambient.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> GroupElement {
        GroupElement { matrix: self.matrix.pow(e), ambient: self.ambient.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// Affine map `v ↦ R v + X` with `R` in `SL(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineElement {
    linear: GroupElement,
    translation: Vec<Rational>,
}

impl AffineElement {
    pub fn new(linear: GroupElement, translation: Vec<Rational>) -> Result<Self, GroupError> {
        if !matches!(**linear.ambient(), AmbientGroup::SpecialLinear(_)) {
            return Err(GroupError::Domain("linear part must lie in SL(n)".into()));
        }
        if translation.len() != linear.size() {
            return Err(GroupError::Domain(format!(
                "translation has length {}, linear part has size {}",
                translation.len(),
                linear.size()
            )));
        }
        Ok(AffineElement { linear, translation })
    }

    pub fn linear(&self) -> &GroupElement {
        &self.linear
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn identity(n: usize) -> Self {
        AffineElement {
            linear: GroupElement::identity(Arc::new(AmbientGroup::SpecialLinear(n))),
            translation: vec![Rational::zero(); n],
        }
    }

    /// `(A, X)(B, Y) = (AB, AY + X)`.
    pub fn mul(&self, other: &AffineElement) -> AffineElement {
        let ay = self.linear.matrix().mul_vec(&other.translation);
        AffineElement {
            linear: self.linear.mul(&other.linear),
            translation: ay.iter().zip(&self.translation).map(|(a, b)| a + b).collect(),
        }
    }

    /// `(A, X)⁻¹ = (A⁻¹, −A⁻¹X)`.
    pub fn inverse(&self) -> AffineElement {
        let inv = self.linear.inverse();
        let t = inv.matrix().mul_vec(&self.translation).into_iter().map(|x| -x).collect();
        AffineElement { linear: inv, translation: t }
    }

    /// Recovers the affine element from its block embedding.
    pub fn from_embedded(g: &GroupElement) -> Result<Self, GroupError> {
        let AmbientGroup::AffineSpecialLinear(n) = **g.ambient() else {
            return Err(GroupError::Domain("element is not in an affine ambient".into()));
        };
        let m = g.matrix();
        let linear = GroupElement::sl(m.submatrix(0, 0, n, n))?;
        let translation = (0..n).map(|i| m[(i, n)].clone()).collect();
        Ok(AffineElement { linear, translation })
    }
}

/// `[[R, X], [0, 1]]` in the affine ambient.
pub fn affine_embed(e: &AffineElement) -> GroupElement {
    let n = e.dim();
    let mut m = RatMatrix::identity(n + 1);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = e.linear.matrix()[(i, j)].clone();
        }
        m[(i, n)] = e.translation[i].clone();
    }
    GroupElement { matrix: m, ambient: Arc::new(AmbientGroup::AffineSpecialLinear(n)) }
}

/// Block-diagonal pair in the product ambient.
pub fn aleph(g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
    if g.ambient() != h.ambient() {
        return Err(GroupError::Domain(format!(
            "blocks from different ambients {} and {}",
            g.ambient(),
            h.ambient()
        )));
    }
    Ok(GroupElement {
        matrix: RatMatrix::block_diag(g.matrix(), h.matrix()),
        ambient: Arc::new(AmbientGroup::Product(Box::new((**g.ambient()).clone()))),
    })
}

fn binary_form_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Action of a `2×2` matrix on binary forms of degree `n − 1`, basis
/// `x^{n−1}, x^{n−2}y, …, y^{n−1}`, by substitution `(x, y) ↦ (x, y)·g`.
/// Column `k` holds the image of the `k`-th basis monomial.
pub fn sym_power_matrix(g: &RatMatrix, n: usize) -> RatMatrix {
    assert!(g.rows() == 2 && g.cols() == 2 && n >= 1);
    // forms as coefficient lists indexed by the power of y
    let first = vec![g[(0, 0)].clone(), g[(1, 0)].clone()]; // a x + c y
    let second = vec![g[(0, 1)].clone(), g[(1, 1)].clone()]; // b x + d y
    let mut out = RatMatrix::zeros(n, n);
    for k in 0..n {
        let mut f = vec![Rational::one()];
        for _ in 0..n - 1 - k {
            f = binary_form_mul(&f, &first);
        }
        for _ in 0..k {
            f = binary_form_mul(&f, &second);
        }
        for (j, c) in f.into_iter().enumerate() {
            out[(j, k)] = c;
        }
    }
    out
}

/// Irreducible `n`-dimensional representation of `SL(2)` applied to `g`.
pub fn sym_power(g: &GroupElement, n: usize) -> Result<GroupElement, GroupError> {
    if n < 2 {
        return Err(GroupError::Domain(format!("symmetric power dimension {n} < 2")));
    }
    if **g.ambient() != AmbientGroup::SpecialLinear(2) {
        return Err(GroupError::Domain("symmetric power needs an SL(2) element".into()));
    }
    GroupElement::sl(sym_power_matrix(g.matrix(), n))
}
