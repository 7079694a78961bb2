//! Nonnegative integers that fall back to a symbolic `+ * ^` expression
//! once their decimal expansion would exceed a digit budget.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::lognum::LogNum;

/// Default number of decimal digits an exact value may carry.
pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

/// Relative width of the band inside which estimate-based comparisons
/// give up and report the operands as incomparable.
pub const UNRELIABILITY_BAND: f64 = 1e-9;

/// Symbolic operands smaller than this many digits are evaluated exactly
/// when structural rules cannot order them.
pub const EVAL_FALLBACK_DIGITS: f64 = 20_000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TowerMode {
    Exact,
    Symbolic,
}

#[derive(Debug)]
enum Node {
    Num(BigUint),
    Add(Vec<TowerInt>),
    Mul(Vec<TowerInt>),
    Pow(TowerInt, TowerInt),
}

/// Arbitrary-size nonnegative integer: exact digits, or an expression DAG
/// with a cached iterated-log magnitude.
#[derive(Clone, Debug)]
pub struct TowerInt {
    node: Arc<Node>,
    log10: LogNum,
}

/// Arithmetic context carrying the digit budget.
#[derive(Clone, Copy, Debug)]
pub struct TowerArith {
    pub digit_budget: u64,
}

impl Default for TowerArith {
    fn default() -> Self {
        TowerArith { digit_budget: DEFAULT_DIGIT_BUDGET }
    }
}

impl TowerInt {
    pub fn from_biguint(n: BigUint) -> Self {
        let log10 = if n.is_zero() {
            LogNum::from_f64(f64::NEG_INFINITY)
        } else {
            LogNum::from_biguint(&n).log10()
        };
        TowerInt { node: Arc::new(Node::Num(n)), log10 }
    }

    pub fn from_u64(n: u64) -> Self {
        Self::from_biguint(BigUint::from(n))
    }

    pub fn zero() -> Self {
        Self::from_u64(0)
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn mode(&self) -> TowerMode {
        match *self.node {
            Node::Num(_) => TowerMode::Exact,
            _ => TowerMode::Symbolic,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.mode() == TowerMode::Exact
    }

    pub fn as_biguint(&self) -> Option<&BigUint> {
        match &*self.node {
            Node::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_biguint().is_some_and(|n| n.is_zero())
    }

    fn is_one(&self) -> bool {
        self.as_biguint().is_some_and(|n| n.is_one())
    }

    /// Iterated-log estimate of `log10(self)`; `-inf` for zero.
    pub fn log10_estimate(&self) -> LogNum {
        self.log10
    }

    /// Estimate of the number of decimal digits, as an iterated-log number.
    pub fn digits_estimate(&self) -> LogNum {
        self.log10
    }

    /// Exact value, evaluating the expression when it has at most `max_digits`
    /// digits.
    pub fn evaluate(&self, max_digits: f64) -> Option<BigUint> {
        match &*self.node {
            Node::Num(n) => Some(n.clone()),
            _ => {
                let est = self.log10.to_f64()?;
                if est > max_digits {
                    return None;
                }
                self.eval_inner(max_digits)
            }
        }
    }

    fn eval_inner(&self, max_digits: f64) -> Option<BigUint> {
        match &*self.node {
            Node::Num(n) => Some(n.clone()),
            Node::Add(ts) => {
                let mut acc = BigUint::zero();
                for t in ts {
                    acc += t.evaluate(max_digits)?;
                }
                Some(acc)
            }
            Node::Mul(fs) => {
                let mut acc = BigUint::one();
                for f in fs {
                    acc *= f.evaluate(max_digits)?;
                }
                Some(acc)
            }
            Node::Pow(b, e) => {
                let b = b.evaluate(max_digits)?;
                if b.is_zero() || b.is_one() {
                    return Some(if e.is_zero() { BigUint::one() } else { b });
                }
                let e = e.evaluate(max_digits)?.to_u32()?;
                Some(b.pow(e))
            }
        }
    }

    /// Structural equality of the expression DAGs.
    pub fn same_expression(&self, other: &TowerInt) -> bool {
        if Arc::ptr_eq(&self.node, &other.node) {
            return true;
        }
        match (&*self.node, &*other.node) {
            (Node::Num(a), Node::Num(b)) => a == b,
            (Node::Add(a), Node::Add(b)) | (Node::Mul(a), Node::Mul(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_expression(y))
            }
            (Node::Pow(a, b), Node::Pow(c, d)) => a.same_expression(c) && b.same_expression(d),
            _ => false,
        }
    }

    /// Total-if-possible comparison. Exact operands compare exactly; symbolic
    /// operands go through structural monotonicity rules, then exact evaluation
    /// when small, then iterated-log estimates. `None` means the operands fall
    /// inside the unreliability band.
    pub fn compare(&self, other: &TowerInt) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (self.as_biguint(), other.as_biguint()) {
            return Some(a.cmp(b));
        }
        if self.same_expression(other) {
            return Some(Ordering::Equal);
        }
        if let (Some(a), Some(b)) = (
            self.evaluate(EVAL_FALLBACK_DIGITS),
            other.evaluate(EVAL_FALLBACK_DIGITS),
        ) {
            return Some(a.cmp(&b));
        }
        let ab = dominates(self, other);
        let ba = dominates(other, self);
        match (ab, ba) {
            (Some(true), _) => Some(Ordering::Less),
            (_, Some(true)) => Some(Ordering::Greater),
            (Some(false), Some(false)) => Some(Ordering::Equal),
            _ => self.log10.cmp_with_band(&other.log10, UNRELIABILITY_BAND),
        }
    }

    /// `Some(true)` when `self <= other` is established, `Some(false)` when
    /// `self > other` is, `None` when undecidable within the band.
    pub fn le(&self, other: &TowerInt) -> Option<bool> {
        if let (Some(a), Some(b)) = (self.as_biguint(), other.as_biguint()) {
            return Some(a <= b);
        }
        if dominates(self, other).is_some() {
            return Some(true);
        }
        if dominates(other, self) == Some(true) {
            return Some(false);
        }
        self.compare(other).map(|o| o != Ordering::Greater)
    }

    fn terms(&self) -> Vec<TowerInt> {
        match &*self.node {
            Node::Add(ts) => ts.clone(),
            _ => vec![self.clone()],
        }
    }

    fn factors(&self) -> Vec<TowerInt> {
        match &*self.node {
            Node::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    fn known_at_least_two(&self) -> bool {
        match self.as_biguint() {
            Some(n) => *n >= BigUint::from(2u32),
            None => true,
        }
    }

    fn known_positive(&self) -> bool {
        !self.is_zero()
    }
}

/// Structural proof that `a <= b`. Returns `Some(strict)` when established
/// (with `strict` meaning `a < b` is also established), `None` otherwise.
fn dominates(a: &TowerInt, b: &TowerInt) -> Option<bool> {
    if a.same_expression(b) {
        return Some(false);
    }
    if let (Some(x), Some(y)) = (a.as_biguint(), b.as_biguint()) {
        return (x <= y).then_some(x < y);
    }
    if a.is_zero() {
        return Some(b.known_positive());
    }
    let a_add = matches!(&*a.node, Node::Add(_));
    let b_add = matches!(&*b.node, Node::Add(_));
    if a_add || b_add {
        return match_parts(&a.terms(), &b.terms(), false, |t| t.known_positive());
    }
    let a_mul = matches!(&*a.node, Node::Mul(_));
    let b_mul = matches!(&*b.node, Node::Mul(_));
    if a_mul || b_mul {
        return match_parts(&a.factors(), &b.factors(), true, |f| f.known_at_least_two());
    }
    if let (Node::Pow(b1, e1), Node::Pow(b2, e2)) = (&*a.node, &*b.node) {
        if let (Some(sb), Some(se)) = (dominates(b1, b2), dominates(e1, e2)) {
            let strict = (sb && e2.known_positive()) || (se && b2.known_at_least_two());
            return Some(strict);
        }
    }
    if let Node::Pow(base, exp) = &*b.node {
        // a <= base <= base^exp when exp >= 1
        if exp.known_positive() && base.known_positive() {
            if let Some(s) = dominates(a, base) {
                return Some(s || (exp.known_at_least_two() && base.known_at_least_two()));
            }
        }
    }
    estimate_le(a, b)
}

fn estimate_le(a: &TowerInt, b: &TowerInt) -> Option<bool> {
    match a.log10.cmp_with_band(&b.log10, UNRELIABILITY_BAND) {
        Some(Ordering::Less) => Some(true),
        _ => None,
    }
}

/// Greedy injective matching of `left` parts onto dominating `right` parts.
/// Unmatched right parts contribute strictness when `grows` holds for them.
/// In factor lists (`multiplicative`) a left part equal to one needs no partner.
fn match_parts(
    left: &[TowerInt],
    right: &[TowerInt],
    multiplicative: bool,
    grows: impl Fn(&TowerInt) -> bool,
) -> Option<bool> {
    let mut used = vec![false; right.len()];
    let mut strict = false;
    for l in left {
        if (!multiplicative && l.is_zero()) || (multiplicative && l.is_one()) {
            continue;
        }
        let mut found = None;
        // prefer an identical partner
        for (j, r) in right.iter().enumerate() {
            if !used[j] && l.same_expression(r) {
                found = Some((j, false));
                break;
            }
        }
        if found.is_none() {
            for (j, r) in right.iter().enumerate() {
                if used[j] {
                    continue;
                }
                if let Some(s) = dominates(l, r) {
                    found = Some((j, s));
                    break;
                }
            }
        }
        let (j, s) = found?;
        used[j] = true;
        strict |= s;
    }
    for (j, r) in right.iter().enumerate() {
        if !used[j] && grows(r) {
            strict = true;
        }
    }
    Some(strict)
}

impl TowerArith {
    pub fn new(digit_budget: u64) -> Self {
        TowerArith { digit_budget }
    }

    fn fits(&self, log10: LogNum) -> bool {
        match log10.to_f64() {
            Some(v) => v < self.digit_budget as f64,
            None => false,
        }
    }

    pub fn add(&self, a: &TowerInt, b: &TowerInt) -> TowerInt {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let log10 = a.log10.exp10().add(b.log10.exp10()).log10();
        if let (Some(x), Some(y)) = (a.as_biguint(), b.as_biguint()) {
            if self.fits(log10) {
                return TowerInt::from_biguint(x + y);
            }
        }
        let mut constant = BigUint::zero();
        let mut terms = Vec::new();
        for t in a.terms().into_iter().chain(b.terms()) {
            match t.as_biguint() {
                Some(n) => constant += n,
                None => terms.push(t),
            }
        }
        // largest symbolic terms first, constant last
        terms.sort_by(|x, y| y.log10.total_cmp(&x.log10));
        if !constant.is_zero() {
            terms.push(TowerInt::from_biguint(constant));
        }
        if terms.len() == 1 {
            return terms.pop().unwrap();
        }
        TowerInt { node: Arc::new(Node::Add(terms)), log10 }
    }

    pub fn mul(&self, a: &TowerInt, b: &TowerInt) -> TowerInt {
        if a.is_one() || b.is_zero() {
            return b.clone();
        }
        if b.is_one() || a.is_zero() {
            return a.clone();
        }
        let log10 = a.log10.add(b.log10);
        if let (Some(x), Some(y)) = (a.as_biguint(), b.as_biguint()) {
            if self.fits(log10) {
                return TowerInt::from_biguint(x * y);
            }
        }
        let mut constant = BigUint::one();
        let mut factors = Vec::new();
        for f in a.factors().into_iter().chain(b.factors()) {
            match f.as_biguint() {
                Some(n) => constant *= n,
                None => factors.push(f),
            }
        }
        if !constant.is_one() {
            factors.insert(0, TowerInt::from_biguint(constant));
        }
        if factors.len() == 1 {
            return factors.pop().unwrap();
        }
        TowerInt { node: Arc::new(Node::Mul(factors)), log10 }
    }

    pub fn pow(&self, base: &TowerInt, exp: &TowerInt) -> TowerInt {
        if exp.is_zero() {
            return TowerInt::one();
        }
        if exp.is_one() || base.is_one() || base.is_zero() {
            return base.clone();
        }
        let log10 = exp.log10.exp10().mul(base.log10);
        if let (Some(x), Some(e)) = (base.as_biguint(), exp.as_biguint()) {
            if self.fits(log10) {
                if let Some(e) = e.to_u32() {
                    return TowerInt::from_biguint(x.pow(e));
                }
            }
        }
        TowerInt { node: Arc::new(Node::Pow(base.clone(), exp.clone())), log10 }
    }
}

impl PartialEq for TowerInt {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Some(Ordering::Equal)
    }
}

impl From<u64> for TowerInt {
    fn from(n: u64) -> Self {
        TowerInt::from_u64(n)
    }
}

impl From<BigUint> for TowerInt {
    fn from(n: BigUint) -> Self {
        TowerInt::from_biguint(n)
    }
}

/// Exact leaves longer than this are abbreviated under `{:#}`.
const ABBREVIATE_DIGITS: usize = 40;

fn is_long_power_of_two(n: &BigUint) -> bool {
    n.bits() > 3 * ABBREVIATE_DIGITS as u64 && n.trailing_zeros() == Some(n.bits() - 1)
}

fn write_leaf(f: &mut fmt::Formatter<'_>, n: &BigUint) -> fmt::Result {
    let text = n.to_string();
    if !f.alternate() || text.len() <= ABBREVIATE_DIGITS {
        return f.write_str(&text);
    }
    if is_long_power_of_two(n) {
        return write!(f, "2^{}", n.bits() - 1);
    }
    write!(f, "{}.{}e{}", &text[..1], &text[1..7], text.len() - 1)
}

/// Canonical expression text. The alternate form `{:#}` shortens long
/// exact leaves to `2^k` or scientific notation.
impl fmt::Display for TowerInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alt = f.alternate();
        let sub = |f: &mut fmt::Formatter<'_>, t: &TowerInt, wrap: bool| -> fmt::Result {
            match (wrap, alt) {
                (true, true) => write!(f, "({t:#})"),
                (true, false) => write!(f, "({t})"),
                (false, true) => write!(f, "{t:#}"),
                (false, false) => write!(f, "{t}"),
            }
        };
        match &*self.node {
            Node::Num(n) => write_leaf(f, n),
            Node::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    sub(f, t, false)?;
                }
                Ok(())
            }
            Node::Mul(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    sub(f, x, matches!(&*x.node, Node::Add(_)))?;
                }
                Ok(())
            }
            Node::Pow(b, e) => {
                let power_leaf = |t: &TowerInt| alt && matches!(&*t.node, Node::Num(n) if is_long_power_of_two(n));
                sub(f, b, !b.is_exact() || power_leaf(b))?;
                f.write_str("^")?;
                sub(f, e, !e.is_exact() || power_leaf(e))
            }
        }
    }
}
