//! Exact multivariate polynomials and ideals over the rationals.

mod decompose;
mod groebner;
mod hilbert;
mod ideal;
mod parse;
mod univariate;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::matrix::{format_rational, Rational};

pub use decompose::{Component, ComponentSummary};
pub use groebner::{s_polynomial, GroebnerLimits};
pub use ideal::{Dimension, Ideal};
pub use parse::{parse_ideal_file, parse_polynomial, parse_rational, ParseError};
pub use univariate::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("computation aborted after {steps} reduction steps (limit {limit})")]
    Aborted { steps: usize, limit: usize },
    #[error("decomposition unsupported: {0}")]
    UnsupportedDecomposition(String),
    #[error("degree of the unit ideal is undefined")]
    UnitIdeal,
}

/// Monomial order tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    Lex,
    #[default]
    GrevLex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => {
                let da: u64 = a.iter().map(|&e| e as u64).sum();
                let db: u64 = b.iter().map(|&e| e as u64).sum();
                da.cmp(&db).then_with(|| {
                    for i in (0..a.len()).rev() {
                        if a[i] != b[i] {
                            return b[i].cmp(&a[i]);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MonomialOrder::Lex => "lex",
            MonomialOrder::GrevLex => "grevlex",
        }
    }
}

pub type Monomial = Vec<u32>;

/// Shared ordered variable list.
pub type Vars = Arc<[String]>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: Vars) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The polynomial consisting of variable `i`.
    pub fn var(vars: Vars, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    pub fn var_named(vars: Vars, name: &str) -> Option<Self> {
        let i = vars.iter().position(|v| v == name)?;
        Some(Self::var(vars, i))
    }

    pub fn monomial(vars: Vars, exps: Monomial, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(vars: Vars, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.nvars()]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Indices of variables that occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    fn add_term(&mut self, e: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.vars.clone());
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = Self::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Multiplies by the monomial `c * x^e`.
    pub fn mul_term(&self, e: &[u32], c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.iter().zip(e).map(|(a, b)| a + b).collect(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.vars.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::Domain(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.nvars()
            )));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Simultaneous substitution of every variable by a polynomial over `target`.
    pub fn substitute(&self, images: &[Polynomial], target: Vars) -> Self {
        assert_eq!(images.len(), self.nvars(), "one image per variable required");
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![p.clone()]).collect();
        let mut out = Polynomial::zero(target.clone());
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(target.clone(), c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() < k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][k as usize - 1]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Re-expresses the polynomial over a variable list containing all used variables.
    pub fn rename_into(&self, target: &Vars) -> Option<Self> {
        let map: Vec<Option<usize>> =
            self.vars.iter().map(|v| target.iter().position(|t| t == v)).collect();
        let mut out = Polynomial::zero(target.clone());
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    ne[map[i]?] = k;
                }
            }
            out.add_term(ne, c.clone());
        }
        Some(out)
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c * Rational::from_integer(BigInt::from(e[var])));
        }
        out
    }

    /// Terms sorted decreasingly in `order`.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(Monomial, Rational)> {
        let mut t: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        t.sort_by(|a, b| order.cmp(&b.0, &a.0));
        t
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<&Monomial> {
        self.terms.keys().max_by(|a, b| order.cmp(a, b))
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Content-free integer form with positive leading coefficient.
    pub fn primitive(&self, order: MonomialOrder) -> Self {
        let Some((_, lc)) = self.leading_term(order) else {
            return self.clone();
        };
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut s = Rational::new(den, num);
        if lc.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn monic(&self, order: MonomialOrder) -> Self {
        match self.leading_term(order) {
            Some((_, lc)) => self.scale(&lc.recip()),
            None => self.clone(),
        }
    }

    pub fn with_vars(&self, vars: Vars) -> Self {
        assert_eq!(vars.len(), self.vars.len());
        Polynomial { vars, terms: self.terms.clone() }
    }

    /// Renders the polynomial with terms in `order`.
    pub fn display_with(&self, order: MonomialOrder) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (e, c)) in self.sorted_terms(order).iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], x)
                    }
                })
                .collect();
            if mono.is_empty() {
                s.push_str(&format_rational(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&format_rational(&a));
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(MonomialOrder::GrevLex))
    }
}

pub(crate) fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn lcm_monomial(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

pub(crate) fn monomial_degree(a: &[u32]) -> u64 {
    a.iter().map(|&x| x as u64).sum()
}
