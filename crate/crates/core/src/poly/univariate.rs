//! Dense univariate polynomials over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Polynomial, Vars};
use crate::matrix::Rational;

/// Coefficients from the constant term upward, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly(Vec<Rational>);

/// Divisor enumeration is skipped for coefficients above this magnitude.
const ROOT_SEARCH_LIMIT: u64 = 1_000_000_000_000;

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    /// Views `p` as a polynomial in variable `var`; `None` if other variables occur.
    pub fn from_poly(p: &Polynomial, var: usize) -> Option<Self> {
        let mut c = vec![Rational::zero(); p.degree_in(var) as usize + 1];
        for (e, k) in p.terms() {
            if e.iter().enumerate().any(|(i, &x)| i != var && x > 0) {
                return None;
            }
            c[e[var] as usize] += k;
        }
        Some(Self::new(c))
    }

    pub fn to_poly(&self, vars: Vars, var: usize) -> Polynomial {
        let n = vars.len();
        Polynomial::from_terms(
            vars,
            self.0.iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; n];
                e[var] = k as u32;
                (e, c.clone())
            }),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.0.last() {
            Some(lc) => Self::new(self.0.iter().map(|c| c / lc).collect()),
            None => self.clone(),
        }
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.0.clone();
        let dl = d.0.last().unwrap();
        let dd = d.degree();
        if r.len() < d.0.len() {
            return (Self::new(vec![]), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / dl;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    r[k + i] -= &c * dc;
                }
            }
            q[k] = c;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`, monic.
    pub fn squarefree_part(&self) -> Self {
        if self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Yun's square-free decomposition: monic, pairwise coprime factors
    /// `(q, k)` with `p = lc · Π q^k`. Constant factors are dropped.
    pub fn squarefree_factors(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let mut c = d.div_rem(&a0).0;
        let mut k = 1;
        while b.degree() > 0 {
            let dk = c.sub(&b.derivative());
            let a = b.gcd(&dk);
            if a.degree() > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_rem(&a).0;
            c = dk.div_rem(&a).0;
            k += 1;
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
                    a - other.0.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    /// Distinct rational roots (rational root theorem); the flag is false when
    /// the search was skipped because coefficients were too large.
    pub fn rational_roots(&self) -> (Vec<Rational>, bool) {
        if self.degree() == 0 {
            return (vec![], true);
        }
        let mut roots = Vec::new();
        let mut p = self.clone();
        while p.0.first().is_some_and(|c| c.is_zero()) {
            if roots.is_empty() {
                roots.push(Rational::zero());
            }
            p = Self::new(p.0[1..].to_vec());
        }
        if p.degree() == 0 {
            return (roots, true);
        }
        let den = p.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.0.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let (a0, an) = (ints[0].abs(), ints.last().unwrap().abs());
        let (Some(a0), Some(an)) = (a0.to_u64(), an.to_u64()) else {
            return (roots, false);
        };
        if a0 > ROOT_SEARCH_LIMIT || an > ROOT_SEARCH_LIMIT {
            return (roots, false);
        }
        for num in divisors(a0) {
            for den in divisors(an) {
                if num.gcd(&den) != 1 {
                    continue;
                }
                for sign in [1i64, -1] {
                    let r = Rational::new(BigInt::from(num) * sign, BigInt::from(den));
                    if p.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        (roots, true)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rat, ratio};

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| rat(x)).collect())
    }

    impl UniPoly {
        fn mul(&self, o: &Self) -> Self {
            let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
            for (i, a) in self.0.iter().enumerate() {
                for (j, b) in o.0.iter().enumerate() {
                    c[i + j] += a * b;
                }
            }
            Self::new(c)
        }
    }

    #[test]
    fn yun_factors_multiply_back() {
        // (x - 1)^3 (x + 2)^2 (x^2 + 1)
        let p = up(&[-1, 3, -3, 1]).mul(&up(&[2, 1])).mul(&up(&[2, 1])).mul(&up(&[1, 0, 1]));
        let f = p.squarefree_factors();
        let ks: Vec<usize> = f.iter().map(|(_, k)| *k).collect();
        assert_eq!(ks, vec![1, 2, 3]);
        assert_eq!(f[0].0, up(&[1, 0, 1]));
        assert_eq!(f[1].0, up(&[2, 1]));
        assert_eq!(f[2].0, up(&[-1, 1]));
    }

    #[test]
    fn squarefree_and_roots() {
        // (x - 1)^2 (2x + 3)
        let p = up(&[3, -4, -1, 2]);
        let s = p.squarefree_part();
        assert_eq!(s.degree(), 2);
        let (roots, complete) = p.rational_roots();
        assert!(complete);
        assert_eq!(roots, vec![ratio(-3, 2), rat(1)]);
    }

    #[test]
    fn irrational_roots_are_not_reported() {
        let (roots, complete) = up(&[-2, 0, 1]).rational_roots();
        assert!(complete && roots.is_empty());
    }
}
