//! Polynomial functionals on block matrices whose zero sets contain the
//! pairs (or affine elements) with matching invariants.

use num_traits::{FromPrimitive, Num};

use super::wedge::{bilinear, p_coefficients, r_vector};
use super::SpectraError;
use crate::matrix::Matrix;

fn halves<T: Clone + Num>(m: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>), SpectraError> {
    if !m.is_square() || m.rows() % 2 != 0 {
        return Err(SpectraError::Domain(format!(
            "expected an even square block matrix, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    let k = m.rows() / 2;
    Ok((m.submatrix(0, 0, k, k), m.submatrix(k, k, k, k)))
}

fn frobenius_sq<T: Clone + Num>(m: &Matrix<T>) -> T {
    m.data().iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
}

/// `tr(g₁₁ᵀg₁₁) − tr(g₂₂ᵀg₂₂)` of the diagonal blocks.
pub fn cartan_functional<T: Clone + Num>(m: &Matrix<T>) -> Result<T, SpectraError> {
    let (a, b) = halves(m)?;
    Ok(frobenius_sq(&a) - frobenius_sq(&b))
}

/// `tr(g₁₁²) − tr(g₂₂²)` of the diagonal blocks.
pub fn trace_square_functional<T: Clone + Num>(m: &Matrix<T>) -> Result<T, SpectraError> {
    let (a, b) = halves(m)?;
    Ok(a.mul(&a).trace() - b.mul(&b).trace())
}

/// Splits `[[A, X], [Yᵀ, k]]` into `A` and `X`.
fn affine_parts<T: Clone + Num>(m: &Matrix<T>, d: usize) -> Result<(Matrix<T>, Vec<T>), SpectraError> {
    if !m.is_square() || m.rows() < 2 {
        return Err(SpectraError::Domain("expected a square matrix of size at least 2".into()));
    }
    let n = m.rows() - 1;
    if d > n {
        return Err(SpectraError::Domain(format!("non-neutral dimension {d} exceeds {n}")));
    }
    Ok((m.submatrix(0, 0, n, n), (0..n).map(|i| m[(i, n)].clone()).collect()))
}

/// `P_A(I − A) X` of `[[A, X], [Yᵀ, k]]`.
pub fn r_functional<T: Clone + Num + FromPrimitive>(m: &Matrix<T>, d: usize) -> Result<Vec<T>, SpectraError> {
    let (a, x) = affine_parts(m, d)?;
    Ok(r_vector(&a, &x, d))
}

/// `Q(u, u)` for `u = P_A(I − A) X`.
pub fn r_norm_squared<T: Clone + Num + FromPrimitive>(
    m: &Matrix<T>,
    d: usize,
    q: &Matrix<T>,
) -> Result<T, SpectraError> {
    let u = r_functional(m, d)?;
    if q.rows() != u.len() {
        return Err(SpectraError::Domain("form size does not match the vector space".into()));
    }
    Ok(bilinear(q, &u, &u))
}

/// `Q(P₁(0)·u₂) − Q(P₂(0)·u₁)` for the two diagonal affine blocks, where
/// `P_i` and `u_i` belong to block `i`.
pub fn e_functional<T: Clone + Num + FromPrimitive>(
    m: &Matrix<T>,
    d: usize,
    q: &Matrix<T>,
) -> Result<T, SpectraError> {
    let (b1, b2) = halves(m)?;
    let (a1, x1) = affine_parts(&b1, d)?;
    let (a2, x2) = affine_parts(&b2, d)?;
    if q.rows() != x1.len() {
        return Err(SpectraError::Domain("form size does not match the vector space".into()));
    }
    let p1 = p_coefficients(&a1, d)[0].clone();
    let p2 = p_coefficients(&a2, d)[0].clone();
    let scaled = |p: &T, v: Vec<T>| -> Vec<T> { v.into_iter().map(|x| p.clone() * x).collect() };
    let l = scaled(&p1, r_vector(&a2, &x2, d));
    let r = scaled(&p2, r_vector(&a1, &x1, d));
    Ok(bilinear(q, &l, &l) - bilinear(q, &r, &r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{affine_embed, aleph, fixtures, GroupElement};
    use crate::matrix::{rat, ratio, RatMatrix};
    use num_traits::Zero;

    #[test]
    fn equal_blocks_vanish() {
        let g = GroupElement::from_i64_rows(&[&[3, 4], &[2, 3]]).unwrap();
        let m = aleph(&g, &g).unwrap();
        assert!(trace_square_functional(m.matrix()).unwrap().is_zero());
        assert!(cartan_functional(m.matrix()).unwrap().is_zero());
    }

    #[test]
    fn orthogonal_conjugates_share_frobenius_norm() {
        let g = GroupElement::from_i64_rows(&[&[3, 4], &[2, 3]]).unwrap();
        let k = GroupElement::sl(RatMatrix::from_rows(vec![
            vec![ratio(3, 5), ratio(-4, 5)],
            vec![ratio(4, 5), ratio(3, 5)],
        ]))
        .unwrap();
        let h = k.mul(&g);
        assert!(cartan_functional(aleph(&g, &h).unwrap().matrix()).unwrap().is_zero());
        assert!(!trace_square_functional(aleph(&g, &h).unwrap().matrix()).unwrap().is_zero());
    }

    #[test]
    fn symmetric_translations_balance() {
        let e = fixtures::diagonal_affine(4, [1, 2, 3]);
        let f = fixtures::diagonal_affine(4, [-1, -2, -3]);
        let m = RatMatrix::block_diag(affine_embed(&e).matrix(), affine_embed(&f).matrix());
        let q = fixtures::antidiagonal_form(3);
        assert!(e_functional(&m, 2, &q).unwrap().is_zero());
        let r = r_functional(affine_embed(&e).matrix(), 2).unwrap();
        assert_eq!(r, vec![rat(0), ratio(-9, 2), rat(0)]);
        assert_eq!(r_norm_squared(affine_embed(&e).matrix(), 2, &q).unwrap(), ratio(81, 4));
    }

    #[test]
    fn shape_errors() {
        let odd = RatMatrix::identity(3);
        assert!(cartan_functional(&odd).is_err());
        assert!(r_functional(&RatMatrix::identity(1), 0).is_err());
    }
}
