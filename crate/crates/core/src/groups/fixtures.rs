//! Standard exact fixtures: free subgroups of `SL(2)`, their symmetric
//! powers, and affine deformations preserving a quadratic form.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{sym_power_matrix, AffineElement, AmbientGroup, GroupElement, RepresentationSpec};
use crate::matrix::{RatMatrix, Rational};

/// Free group on `[[1,2],[0,1]]`, `[[1,0],[2,1]]` (contains unipotents).
pub fn sanov() -> RepresentationSpec {
    RepresentationSpec::sl_from_i64(&[("a", &[&[1, 2], &[0, 1]]), ("b", &[&[1, 0], &[2, 1]])])
        .expect("valid fixture")
        .with_density_assertion(true)
}

/// Schottky group whose nontrivial elements are all hyperbolic.
pub fn schottky() -> RepresentationSpec {
    RepresentationSpec::sl_from_i64(&[("a", &[&[3, 4], &[2, 3]]), ("b", &[&[5, 24], &[1, 5]])])
        .expect("valid fixture")
        .with_density_assertion(true)
}

/// Symmetric form `q² − 4pr` on binary quadratic forms `p x² + q xy + r y²`,
/// preserved by the three-dimensional symmetric power.
pub fn discriminant_form() -> RatMatrix {
    RatMatrix::from_i64_rows(&[&[0, 0, -2], &[0, 1, 0], &[-2, 0, 0]])
}

/// Anti-diagonal form `Σ x_i x_{n+1−i}`, preserved by `diag(t, 1, 1/t)`.
pub fn antidiagonal_form(n: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, n - 1 - i)] = Rational::from_integer(1.into());
    }
    m
}

/// `n`-dimensional symmetric power of a representation into `SL(2)`.
pub fn symmetric_power_rep(rep: &RepresentationSpec, n: usize) -> RepresentationSpec {
    let gens = rep
        .generators
        .iter()
        .map(|g| (g.name.clone(), sym_power_matrix(g.image.matrix(), n)))
        .collect();
    let mut out = RepresentationSpec::new(Arc::new(AmbientGroup::SpecialLinear(n)), gens)
        .expect("symmetric powers of SL(2) lie in SL(n)");
    out.assume_zariski_dense = rep.assume_zariski_dense;
    if n == 3 {
        out.invariant_form = Some(discriminant_form());
    }
    out
}

/// Fuchsian fixture: symmetric power of the Schottky group.
pub fn fuchsian(n: usize) -> RepresentationSpec {
    symmetric_power_rep(&schottky(), n)
}

/// Primitive integer generator of `ker(m − I)` when it is one-dimensional,
/// with its first nonzero entry positive.
pub fn neutral_vector(m: &RatMatrix) -> Option<Vec<Rational>> {
    let shifted = m.sub(&RatMatrix::identity(m.rows()));
    let mut ns = shifted.nullspace();
    if ns.len() != 1 {
        return None;
    }
    Some(primitive_integer_vector(&ns.remove(0)))
}

pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let den = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        BigInt::from(-1)
    } else {
        BigInt::from(1)
    };
    ints.into_iter().map(|x| Rational::from_integer(x / &g * &sign)).collect()
}

/// Affine deformation of the three-dimensional Fuchsian fixture: generator
/// `s` translates by `scales[i]` times the neutral vector of its linear part.
pub fn affine_so21(scales: &[i64]) -> RepresentationSpec {
    let linear = fuchsian(3);
    let gens = linear
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let v = neutral_vector(g.image.matrix()).expect("hyperbolic elements fix a line");
            let k = Rational::from_integer(scales.get(i).copied().unwrap_or(1).into());
            let t = v.iter().map(|x| x * &k).collect();
            (g.name.clone(), AffineElement::new(g.image.clone(), t).expect("matching sizes"))
        })
        .collect();
    RepresentationSpec::affine(gens)
        .expect("valid fixture")
        .with_invariant_form(discriminant_form())
}

/// The linear Fuchsian fixture embedded with zero translations.
pub fn affine_so21_untranslated() -> RepresentationSpec {
    affine_so21(&[0, 0])
}

/// Single loxodromic element `diag(t, 1, 1/t)` with translation `x`.
pub fn diagonal_affine(t: i64, x: [i64; 3]) -> AffineElement {
    let tt = Rational::from_integer(t.into());
    let lin = GroupElement::sl(RatMatrix::diagonal(&[tt.clone(), Rational::from_integer(1.into()), tt.recip()]))
        .expect("determinant one");
    AffineElement::new(lin, x.iter().map(|&v| Rational::from_integer(v.into())).collect()).expect("size 3")
}

/// Multiplies the image of generator `index` by a conjugate of
/// `diag(2, 1/2)`, which changes its spectrum.
pub fn perturbed(rep: &RepresentationSpec, index: usize) -> RepresentationSpec {
    let c = RatMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
    let two = Rational::from_integer(2.into());
    let d = RatMatrix::diagonal(&[two.clone(), two.recip()]);
    let p = c.mul(&d).mul(&c.inverse().expect("unimodular"));
    let gens = rep
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let m = g.image.matrix();
            (g.name.clone(), if i == index { m.mul(&p) } else { m.clone() })
        })
        .collect();
    let mut out = RepresentationSpec::new(rep.ambient.clone(), gens).expect("determinant one");
    out.assume_zariski_dense = rep.assume_zariski_dense;
    out
}

/// Same names with the images of the first two generators exchanged.
pub fn swapped(rep: &RepresentationSpec) -> RepresentationSpec {
    let mut gens: Vec<(String, RatMatrix)> =
        rep.generators.iter().map(|g| (g.name.clone(), g.image.matrix().clone())).collect();
    let (m0, m1) = (gens[0].1.clone(), gens[1].1.clone());
    gens[0].1 = m1;
    gens[1].1 = m0;
    let mut out = RepresentationSpec::new(rep.ambient.clone(), gens).expect("same ambient");
    out.assume_zariski_dense = rep.assume_zariski_dense;
    out
}
