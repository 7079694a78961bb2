//! Eigenvalue moduli from the exact characteristic polynomial.
//!
//! Repeated roots are split off exactly first, so the numerical work only
//! ever sees simple roots.

use nalgebra::Complex;
use num_traits::{ToPrimitive, Zero};

use super::wedge_traces;
use crate::matrix::RatMatrix;
use crate::poly::UniPoly;

const MAX_SWEEPS: usize = 500;

pub(crate) fn horner(p: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut v = Complex::new(0.0, 0.0);
    let mut d = Complex::new(0.0, 0.0);
    for &c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// Starting points on circles with radii read off the upper convex hull of
/// `(k, ln|a_k|)`, so roots of very different sizes start apart.
fn initial_guesses(p: &[f64]) -> Vec<Complex<f64>> {
    let n = p.len() - 1;
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for (k, c) in p.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        let q = (k as f64, c.abs().ln());
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    let mut z = vec![Complex::new(0.0, 0.0); hull[0].0 as usize];
    for (s, w) in hull.windows(2).enumerate() {
        let m = (w[1].0 - w[0].0) as usize;
        let r = ((w[0].1 - w[1].1) / m as f64).exp();
        for k in 0..m {
            let theta = std::f64::consts::TAU * k as f64 / m as f64 + 0.7 * s as f64 + 0.4;
            z.push(Complex::from_polar(r, theta));
        }
    }
    debug_assert_eq!(z.len(), n);
    z
}

/// Aberth iteration on a polynomial with simple roots, ascending
/// coefficients.
fn simple_roots(p: &[f64]) -> Option<Vec<Complex<f64>>> {
    let n = p.len() - 1;
    if n == 1 {
        return Some(vec![Complex::new(-p[0] / p[1], 0.0)]);
    }
    let mut z = initial_guesses(p);
    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for k in 0..n {
            let (v, d) = horner(p, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex<f64> = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() > 4.0 * f64::EPSILON * z[k].norm() {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z.iter().all(|r| r.re.is_finite() && r.im.is_finite()).then_some(z)
}

/// Descending eigenvalue moduli with multiplicity, or `None` when the
/// coefficients leave double range or the iteration breaks down.
pub(crate) fn exact_moduli_desc(g: &RatMatrix) -> Option<Vec<f64>> {
    let n = g.rows();
    let e = wedge_traces(g);
    let c: Vec<_> = (0..=n).map(|j| if (n - j) % 2 == 0 { e[n - j].clone() } else { -e[n - j].clone() }).collect();
    let chi = UniPoly::new(c);
    if chi.coeffs().first().is_none_or(|c| c.is_zero()) {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    for (q, k) in chi.squarefree_factors() {
        let p: Vec<f64> = q.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        if p.iter().any(|x| !x.is_finite()) {
            return None;
        }
        for r in simple_roots(&p)? {
            out.extend(std::iter::repeat_n(r.norm(), k));
        }
    }
    out.sort_by(|a, b| b.total_cmp(a));
    (out.len() == n && out.iter().all(|x| *x > 0.0)).then_some(out)
}
