//! Exterior-power traces and the characteristic polynomial of `I − A`
//! restricted to the non-neutral part.

use num_traits::{FromPrimitive, Num};

use crate::matrix::Matrix;

/// `tr(∧^k B)` for `k = 0..=n` by the Faddeev–LeVerrier recursion.
pub fn wedge_traces<T: Clone + Num + FromPrimitive>(b: &Matrix<T>) -> Vec<T> {
    assert!(b.is_square(), "wedge traces of a non-square matrix");
    let n = b.rows();
    // c[j] is the coefficient of x^j in det(xI − B)
    let mut c = vec![T::zero(); n + 1];
    c[n] = T::one();
    let id = Matrix::<T>::identity(n);
    let mut m = Matrix::<T>::zeros(n, n);
    for k in 1..=n {
        m = b.mul(&m).add(&id.scale(&c[n - k + 1]));
        let t = b.mul(&m).trace();
        c[n - k] = T::zero() - t / T::from_usize(k).expect("small integer");
    }
    (0..=n)
        .map(|k| if k % 2 == 0 { c[n - k].clone() } else { T::zero() - c[n - k].clone() })
        .collect()
}

/// `I − A`.
pub fn shifted<T: Clone + Num>(a: &Matrix<T>) -> Matrix<T> {
    Matrix::identity(a.rows()).sub(a)
}

/// Ascending coefficients of `P_A(x) = Σ_k (−1)^{d−k} tr(∧^{d−k}(I−A)) x^k`
/// where `d` is the dimension of the non-neutral part.
pub fn p_coefficients<T: Clone + Num + FromPrimitive>(a: &Matrix<T>, d: usize) -> Vec<T> {
    assert!(d <= a.rows(), "non-neutral dimension exceeds the matrix size");
    let e = wedge_traces(&shifted(a));
    (0..=d)
        .map(|k| {
            let v = e[d - k].clone();
            if (d - k) % 2 == 0 {
                v
            } else {
                T::zero() - v
            }
        })
        .collect()
}

/// `p(M) x` by Horner's rule, with `coeffs` ascending.
pub fn apply_polynomial<T: Clone + Num>(coeffs: &[T], m: &Matrix<T>, x: &[T]) -> Vec<T> {
    let mut v: Vec<T> = vec![T::zero(); x.len()];
    for c in coeffs.iter().rev() {
        v = m.mul_vec(&v);
        for (vi, xi) in v.iter_mut().zip(x) {
            *vi = vi.clone() + c.clone() * xi.clone();
        }
    }
    v
}

/// `P_A(I − A) X`.
pub fn r_vector<T: Clone + Num + FromPrimitive>(a: &Matrix<T>, x: &[T], d: usize) -> Vec<T> {
    apply_polynomial(&p_coefficients(a, d), &shifted(a), x)
}

/// `xᵀ Q y`.
pub fn bilinear<T: Clone + Num>(q: &Matrix<T>, x: &[T], y: &[T]) -> T {
    x.iter().zip(q.mul_vec(y)).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b)
}
