//! Escape-bound calculus.
//!
//! The recursion `f_{x,y}` sends `(x, y)` to `(x^(2^x) * y^(x 2^x), y^(2^x))`
//! and the escape bound of a variety profile `(irr, mdeg, d)` is the sum of
//! the first coordinates `x_0 + x_1 + ... + x_d` of that orbit. Values blow
//! up after two or three steps, so everything here runs on [`TowerInt`].

mod lognum;
mod tower;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lognum::LogNum;
pub use tower::{TowerArith, TowerInt, TowerMode, DEFAULT_DIGIT_BUDGET, UNRELIABILITY_BAND};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("comparison undecidable within the unreliability band: {0}")]
    Incomparable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Exact,
    UpperBound,
}

/// Component count, maximal component degree and maximal component
/// dimension of a nonempty variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyProfile {
    pub irr: u64,
    pub mdeg: u64,
    pub d: u64,
    pub certainty: Certainty,
}

impl VarietyProfile {
    pub fn new(irr: u64, mdeg: u64, d: u64, certainty: Certainty) -> Result<Self, BoundsError> {
        if irr == 0 || mdeg == 0 {
            return Err(BoundsError::Domain(format!(
                "profile needs irr >= 1 and mdeg >= 1, got ({irr}, {mdeg}, {d})"
            )));
        }
        Ok(VarietyProfile { irr, mdeg, d, certainty })
    }

    pub fn exact(irr: u64, mdeg: u64, d: u64) -> Result<Self, BoundsError> {
        Self::new(irr, mdeg, d, Certainty::Exact)
    }

    pub fn upper_bound(irr: u64, mdeg: u64, d: u64) -> Result<Self, BoundsError> {
        Self::new(irr, mdeg, d, Certainty::UpperBound)
    }
}

impl fmt::Display for VarietyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.certainty {
            Certainty::Exact => "exact",
            Certainty::UpperBound => "upper bound",
        };
        write!(f, "(irr={}, mdeg={}, d={}; {tag})", self.irr, self.mdeg, self.d)
    }
}

/// Either the empty variety or the profile of a nonempty one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarietySummary {
    Empty,
    Profile(VarietyProfile),
}

impl VarietySummary {
    pub fn profile(&self) -> Option<&VarietyProfile> {
        match self {
            VarietySummary::Empty => None,
            VarietySummary::Profile(p) => Some(p),
        }
    }
}

fn require_positive(v: &TowerInt, what: &str) -> Result<(), BoundsError> {
    if v.is_zero() {
        Err(BoundsError::Domain(format!("{what} must be >= 1")))
    } else {
        Ok(())
    }
}

/// One step of the recursion: `(x^(2^x) * y^(x 2^x), y^(2^x))`.
pub fn f_step(x: &TowerInt, y: &TowerInt) -> Result<(TowerInt, TowerInt), BoundsError> {
    f_step_with(&TowerArith::default(), x, y)
}

pub fn f_step_with(
    ar: &TowerArith,
    x: &TowerInt,
    y: &TowerInt,
) -> Result<(TowerInt, TowerInt), BoundsError> {
    require_positive(x, "x")?;
    require_positive(y, "y")?;
    let two_x = ar.pow(&TowerInt::from_u64(2), x);
    let x_next = ar.mul(&ar.pow(x, &two_x), &ar.pow(y, &ar.mul(x, &two_x)));
    let y_next = ar.pow(y, &two_x);
    Ok((x_next, y_next))
}

/// `f_{x,y}(n)`.
pub fn f_iterate(
    ar: &TowerArith,
    x: &TowerInt,
    y: &TowerInt,
    n: u64,
) -> Result<(TowerInt, TowerInt), BoundsError> {
    let (mut a, mut b) = (x.clone(), y.clone());
    require_positive(&a, "x")?;
    require_positive(&b, "y")?;
    for _ in 0..n {
        (a, b) = f_step_with(ar, &a, &b)?;
    }
    Ok((a, b))
}

/// `M(irr, mdeg, d)`. Upper-bound profiles yield a valid, possibly loose
/// bound because `M` is monotone in every argument.
pub fn escape_bound(profile: &VarietyProfile) -> TowerInt {
    escape_bound_with(&TowerArith::default(), profile)
}

pub fn escape_bound_with(ar: &TowerArith, profile: &VarietyProfile) -> TowerInt {
    let mut x = TowerInt::from_u64(profile.irr);
    let mut y = TowerInt::from_u64(profile.mdeg);
    let mut total = x.clone();
    for _ in 0..profile.d {
        // irr, mdeg >= 1 is enforced by the profile constructor
        (x, y) = f_step_with(ar, &x, &y).expect("profile entries are positive");
        total = ar.add(&total, &x);
    }
    total
}

fn le_or_err(a: &TowerInt, b: &TowerInt, what: &str) -> Result<bool, BoundsError> {
    a.le(b).ok_or_else(|| BoundsError::Incomparable(what.to_string()))
}

/// Checks `f_{a,b}(n) <= f_{A,B}(n+1)` componentwise, after verifying the
/// precondition `(a, b) <= f_{A,B}(1)`.
pub fn check_f_monotone(
    a: &TowerInt,
    b: &TowerInt,
    big_a: &TowerInt,
    big_b: &TowerInt,
    n: i64,
) -> Result<bool, BoundsError> {
    check_f_monotone_with(&TowerArith::default(), a, b, big_a, big_b, n)
}

pub fn check_f_monotone_with(
    ar: &TowerArith,
    a: &TowerInt,
    b: &TowerInt,
    big_a: &TowerInt,
    big_b: &TowerInt,
    n: i64,
) -> Result<bool, BoundsError> {
    if n < 0 {
        return Err(BoundsError::Domain(format!("n must be nonnegative, got {n}")));
    }
    let n = n as u64;
    let (a1, b1) = f_step_with(ar, big_a, big_b)?;
    require_positive(a, "a")?;
    require_positive(b, "b")?;
    if !le_or_err(a, &a1, "a vs A^(2^A) B^(A 2^A)")? || !le_or_err(b, &b1, "b vs B^(2^A)")? {
        return Err(BoundsError::PreconditionFailed(format!(
            "(a, b) = ({a}, {b}) exceeds (A^(2^A) B^(A 2^A), B^(2^A)) = ({a1}, {b1})"
        )));
    }
    let (lx, ly) = f_iterate(ar, a, b, n)?;
    let (rx, ry) = f_iterate(ar, &a1, &b1, n)?;
    Ok(le_or_err(&lx, &rx, "first coordinates")? && le_or_err(&ly, &ry, "second coordinates")?)
}

/// The one-step tower inequalities relating a child profile to its parent:
/// `irr' <= irr^(2^irr) mdeg^(irr 2^irr)` and `mdeg' <= mdeg^(2^irr)`.
pub fn tower_inequalities_hold(
    parent: &VarietyProfile,
    child: &VarietyProfile,
) -> Result<bool, BoundsError> {
    let ar = TowerArith::default();
    let (ci, cd) = f_step_with(
        &ar,
        &TowerInt::from_u64(parent.irr),
        &TowerInt::from_u64(parent.mdeg),
    )?;
    Ok(le_or_err(&TowerInt::from_u64(child.irr), &ci, "irr bound")?
        && le_or_err(&TowerInt::from_u64(child.mdeg), &cd, "mdeg bound")?)
}

/// Checks `M(child) + irr(parent) <= M(parent)`.
pub fn check_bound_decrement(
    parent: &VarietyProfile,
    child: &VarietyProfile,
) -> Result<bool, BoundsError> {
    check_bound_decrement_with(&TowerArith::default(), parent, child)
}

pub fn check_bound_decrement_with(
    ar: &TowerArith,
    parent: &VarietyProfile,
    child: &VarietyProfile,
) -> Result<bool, BoundsError> {
    if child.d >= parent.d {
        return Err(BoundsError::PreconditionFailed(format!(
            "child dimension {} is not below parent dimension {}",
            child.d, parent.d
        )));
    }
    if !tower_inequalities_hold(parent, child)? {
        return Err(BoundsError::PreconditionFailed(format!(
            "child {child} violates the tower inequalities relative to {parent}"
        )));
    }
    let lhs = ar.add(&escape_bound_with(ar, child), &TowerInt::from_u64(parent.irr));
    let rhs = escape_bound_with(ar, parent);
    le_or_err(&lhs, &rhs, "M(child) + irr vs M(parent)")
}
