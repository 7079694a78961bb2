//! Random exact fixtures shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use rigidity_core::matrix::{ratio, RatMatrix, Rational};

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.gen_range(-6i64..=6);
    let d = rng.gen_range(1i64..=4);
    ratio(n, d)
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let q = small_rational(rng);
        if q != ratio(0, 1) {
            return q;
        }
    }
}

/// Product of elementary and diagonal factors, so the determinant is one.
pub fn random_sl2<R: Rng>(rng: &mut R) -> RatMatrix {
    let mut m = RatMatrix::identity(2);
    for _ in 0..rng.gen_range(2..5) {
        let q = small_rational(rng);
        let f = match rng.gen_range(0..3) {
            0 => RatMatrix::from_rows(vec![vec![ratio(1, 1), q], vec![ratio(0, 1), ratio(1, 1)]]),
            1 => RatMatrix::from_rows(vec![vec![ratio(1, 1), ratio(0, 1)], vec![q, ratio(1, 1)]]),
            _ => {
                let t = nonzero_rational(rng);
                RatMatrix::diagonal(&[t.clone(), t.recip()])
            }
        };
        m = m.mul(&f);
    }
    m
}

/// Integer matrix with small entries and nonzero determinant.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    loop {
        let rows: Vec<Vec<Rational>> =
            (0..n).map(|_| (0..n).map(|_| ratio(rng.gen_range(-3i64..=3), 1)).collect()).collect();
        let m = RatMatrix::from_rows(rows);
        if m.det() != ratio(0, 1) {
            return m;
        }
    }
}

/// Cayley transform `(I − S)(I + S)⁻¹` of a random skew matrix: a rational
/// rotation.
pub fn rational_rotation<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    let mut s = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let q = small_rational(rng);
            s[(i, j)] = q.clone();
            s[(j, i)] = -q;
        }
    }
    let id = RatMatrix::identity(n);
    id.sub(&s).mul(&id.add(&s).inverse().expect("I + S is invertible for skew S"))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
