//! Subvarieties of ambient matrix groups: translates, intersections,
//! profiles, descending intersection towers and escape witnesses.

mod ambient;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use ambient::{symbolic_det, AmbientDescription, AmbientGroup, Entry};

use crate::bounds::{
    check_bound_decrement, escape_bound, tower_inequalities_hold, BoundsError, TowerInt,
    VarietyProfile, VarietySummary,
};
use crate::groups::{Alphabet, BallLimits, BallWalker, GroupElement, GroupError, Word};
use crate::matrix::RatMatrix;
use crate::poly::{
    parse_ideal_file, ComponentSummary, Dimension, Ideal, ParseError, PolyError, Polynomial,
};

#[derive(Debug, Error)]
pub enum VarietyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("escape stalled after {steps} steps at {stable} ({})",
        if *.provably_stable { "invariant under every generator" } else { "no generator improves the heuristics" })]
    EscapeStalled { stable: String, steps: usize, provably_stable: bool },
}

/// Zero set, inside an ambient group, of a list of polynomials in the
/// ambient's matrix-entry variables.
#[derive(Clone, Debug)]
pub struct Variety {
    ambient: Arc<AmbientGroup>,
    ideal: Ideal,
    full: Ideal,
    profile: Option<VarietySummary>,
}

impl Variety {
    pub fn new(ambient: Arc<AmbientGroup>, generators: Vec<Polynomial>) -> Result<Self, VarietyError> {
        let v = ambient.variables();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let g = g.rename_into(&v).ok_or_else(|| {
                VarietyError::Domain(format!("polynomial uses variables outside {}", ambient))
            })?;
            gens.push(g);
        }
        let ideal = Ideal::new(v, gens);
        let full = ambient.defining_ideal().join(&ideal);
        Ok(Variety { ambient, ideal, full, profile: None })
    }

    /// The whole ambient group.
    pub fn ambient_only(ambient: Arc<AmbientGroup>) -> Self {
        Self::new(ambient, vec![]).expect("no generators")
    }

    /// Reads one polynomial per line, `#` starting a comment.
    pub fn parse(ambient: Arc<AmbientGroup>, text: &str) -> Result<Self, VarietyError> {
        let gens = parse_ideal_file(text, &ambient.variables())?;
        Self::new(ambient, gens)
    }

    pub fn ambient(&self) -> &Arc<AmbientGroup> {
        &self.ambient
    }

    /// The variety's own generators.
    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    /// Own generators joined with the ambient defining ideal.
    pub fn full_ideal(&self) -> &Ideal {
        &self.full
    }

    pub fn profile(&self) -> Option<&VarietySummary> {
        self.profile.as_ref()
    }

    pub fn with_profile(mut self, summary: VarietySummary) -> Self {
        self.profile = Some(summary);
        self
    }

    pub fn dimension(&self) -> Result<Dimension, VarietyError> {
        Ok(self.full.dimension()?)
    }

    pub fn is_empty(&self) -> Result<bool, VarietyError> {
        Ok(self.full.is_unit()?)
    }

    /// Exact membership of an ambient matrix.
    pub fn contains_matrix(&self, m: &RatMatrix) -> Result<bool, VarietyError> {
        if !self.ambient.contains(m) {
            return Ok(false);
        }
        Ok(self.ideal.vanishes_at(&self.ambient.point_of(m))?)
    }

    /// Equality as sets of the ambient, via reduced bases.
    pub fn same_as(&self, other: &Variety) -> Result<bool, VarietyError> {
        if self.ambient != other.ambient {
            return Ok(false);
        }
        Ok(self.full.same_ideal(&other.full)?)
    }

    /// `gX`: every generator `f` becomes `M ↦ f(g⁻¹M)`.
    pub fn translate(&self, g: &GroupElement) -> Result<Variety, VarietyError> {
        if g.ambient() != &self.ambient {
            return Err(VarietyError::Domain(format!(
                "element of {} cannot act on a subvariety of {}",
                g.ambient(),
                self.ambient
            )));
        }
        let ginv = g.inverse();
        let images = left_multiplied(&self.ambient, ginv.matrix());
        let v = self.ambient.variables();
        let gens = self.ideal.generators().iter().map(|f| f.substitute(&images, v.clone())).collect();
        Variety::new(self.ambient.clone(), gens)
    }

    pub fn intersect(&self, other: &Variety) -> Result<Variety, VarietyError> {
        if self.ambient != other.ambient {
            return Err(VarietyError::Domain(format!(
                "cannot intersect subvarieties of {} and {}",
                self.ambient, other.ambient
            )));
        }
        let mut gens = self.ideal.generators().to_vec();
        gens.extend(other.ideal.generators().iter().cloned());
        Variety::new(self.ambient.clone(), gens)
    }

    /// Exact profile when the ideal decomposes, otherwise Bezout bounds on
    /// the component count and degrees with the exact dimension.
    pub fn profile_of(&self) -> Result<ProfileReport, VarietyError> {
        if self.full.is_unit()? {
            return Ok(ProfileReport {
                summary: VarietySummary::Empty,
                components: Some(vec![]),
                top_components: Some(0),
                degree: Some(0),
            });
        }
        let d = self.full.dimension()?.value().expect("nonempty") as u64;
        let degree = self.full.degree()?;
        match self.full.decompose() {
            Ok(comps) => {
                let summaries: Vec<ComponentSummary> = comps.iter().map(|c| c.summary()).collect();
                let irr = summaries.iter().map(|c| c.geometric_count).sum();
                let mdeg = summaries.iter().map(|c| c.degree).max().unwrap_or(1);
                let top = summaries
                    .iter()
                    .filter(|c| c.dimension as u64 == d)
                    .map(|c| c.geometric_count)
                    .sum();
                Ok(ProfileReport {
                    summary: VarietySummary::Profile(VarietyProfile::exact(irr, mdeg, d)?),
                    components: Some(summaries),
                    top_components: Some(top),
                    degree: Some(degree),
                })
            }
            Err(PolyError::UnsupportedDecomposition(_)) => {
                let b = self.full.bezout_bound();
                Ok(ProfileReport {
                    summary: VarietySummary::Profile(VarietyProfile::upper_bound(b, b, d)?),
                    components: None,
                    top_components: None,
                    degree: Some(degree),
                })
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// Entries of `a·M` for the ambient's symbolic matrix `M`, one polynomial
/// per ambient variable.
fn left_multiplied(ambient: &AmbientGroup, a: &RatMatrix) -> Vec<Polynomial> {
    let (grid, v) = ambient.layout();
    let sym = ambient.symbolic_matrix();
    let size = grid.len();
    let mut images = vec![Polynomial::zero(v.clone()); v.len()];
    for (i, row) in grid.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if let Entry::Var(k) = e {
                let mut acc = Polynomial::zero(v.clone());
                for l in 0..size {
                    if !num_traits::Zero::is_zero(&a[(i, l)]) {
                        acc = acc.add(&sym[l][j].scale(&a[(i, l)]));
                    }
                }
                images[*k] = acc;
            }
        }
    }
    images
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileReport {
    pub summary: VarietySummary,
    /// Present when the decomposition succeeded.
    pub components: Option<Vec<ComponentSummary>>,
    /// Components of maximal dimension, counted over the complex numbers.
    pub top_components: Option<u64>,
    /// Affine degree of the maximal-dimensional part.
    pub degree: Option<u64>,
}

impl ProfileReport {
    fn dim_rank(&self) -> i64 {
        self.summary.profile().map_or(-1, |p| p.d as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepReason {
    DimensionDrop,
    ComponentDrop,
    DegreeDrop,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerStep {
    pub generator: String,
    pub reason: StepReason,
    pub profile: ProfileReport,
}

/// Descending chain `V₀ = X`, `V_{i+1} = V_i ∩ s_i V_i` ending below the
/// starting dimension.
#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub start: ProfileReport,
    pub steps: Vec<TowerStep>,
    pub final_ideal: String,
    #[serde(skip)]
    pub final_variety: Variety,
    /// `m ≤ irr(X)` for the tracked start profile.
    pub within_irr_bound: bool,
    /// Component and degree growth bounds between start and end profiles.
    pub inequalities_hold: bool,
    /// `M(end) + irr(start) ≤ M(start)`; `None` when the end is empty.
    pub bound_decrement: Option<bool>,
}

impl TowerReport {
    pub fn length(&self) -> usize {
        self.steps.len()
    }
}

struct Candidate {
    index: usize,
    reason: Option<StepReason>,
    variety: Variety,
    profile: ProfileReport,
}

fn step_reason(parent: &ProfileReport, child: &ProfileReport) -> Option<StepReason> {
    if child.dim_rank() < parent.dim_rank() {
        return Some(StepReason::DimensionDrop);
    }
    if let (Some(a), Some(b)) = (parent.top_components, child.top_components) {
        if b < a {
            return Some(StepReason::ComponentDrop);
        }
    }
    if let (Some(a), Some(b)) = (parent.degree, child.degree) {
        if b < a {
            return Some(StepReason::DegreeDrop);
        }
    }
    None
}

/// Greedy descent: at each level try every symbol, keep the first symbol
/// in alphabet order among those with the best improvement (dimension,
/// then top-dimensional component count, then degree).
pub fn escape_tower(v: &Variety, alphabet: &Alphabet) -> Result<TowerReport, VarietyError> {
    let elements = alphabet_elements(v, alphabet)?;
    let start = v.profile_of()?;
    let Some(start_profile) = start.summary.profile().copied() else {
        return Err(VarietyError::Domain("the variety is empty".into()));
    };
    if start_profile.d as usize >= v.ambient.variables().len()
        || v.full.same_ideal(&v.ambient.defining_ideal())?
    {
        return Err(VarietyError::Domain("the variety is the whole ambient group".into()));
    }
    let cap = start_profile.irr.saturating_mul(start_profile.mdeg).max(1) as usize;
    let mut current = v.clone();
    let mut current_profile = start.clone();
    let mut steps = Vec::new();
    while current_profile.dim_rank() >= start.dim_rank() {
        if steps.len() >= cap {
            return Err(VarietyError::EscapeStalled {
                stable: current.full.to_string(),
                steps: steps.len(),
                provably_stable: false,
            });
        }
        let candidates: Vec<Result<Candidate, VarietyError>> = elements
            .par_iter()
            .enumerate()
            .map(|(index, g)| {
                let w = current.intersect(&current.translate(g)?)?;
                let profile = w.profile_of()?;
                let reason = step_reason(&current_profile, &profile);
                Ok(Candidate { index, reason, variety: w, profile })
            })
            .collect();
        let candidates = candidates.into_iter().collect::<Result<Vec<_>, _>>()?;
        let best = candidates
            .into_iter()
            .filter(|c| c.reason.is_some())
            .min_by_key(|c| (c.reason.map(|r| r as u8), c.index));
        let Some(best) = best else {
            let provably_stable = elements
                .iter()
                .map(|g| current.translate(g).and_then(|t| t.same_as(&current)))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .all(|b| b);
            return Err(VarietyError::EscapeStalled {
                stable: current.full.to_string(),
                steps: steps.len(),
                provably_stable,
            });
        };
        steps.push(TowerStep {
            generator: alphabet.names()[best.index].clone(),
            reason: best.reason.expect("filtered"),
            profile: best.profile.clone(),
        });
        current = best.variety.with_profile(best.profile.summary);
        current_profile = best.profile;
    }
    let (inequalities_hold, bound_decrement) = match current_profile.summary.profile() {
        None => (true, None),
        Some(end) => (
            tower_inequalities_hold(&start_profile, end)?,
            Some(check_bound_decrement(&start_profile, end)?),
        ),
    };
    Ok(TowerReport {
        within_irr_bound: steps.len() as u64 <= start_profile.irr,
        start,
        steps,
        final_ideal: current.full.to_string(),
        final_variety: current,
        inequalities_hold,
        bound_decrement,
    })
}

/// Repeats [`escape_tower`] until the variety is empty, returning each stage.
pub fn full_descent(v: &Variety, alphabet: &Alphabet) -> Result<Vec<TowerReport>, VarietyError> {
    let mut out = Vec::new();
    let mut current = v.clone();
    while !current.is_empty()? {
        let report = escape_tower(&current, alphabet)?;
        current = report.final_variety.clone();
        out.push(report);
    }
    Ok(out)
}

fn alphabet_elements(v: &Variety, alphabet: &Alphabet) -> Result<Vec<GroupElement>, VarietyError> {
    alphabet
        .matrices()
        .iter()
        .map(|m| GroupElement::new(v.ambient.clone(), m.clone()).map_err(VarietyError::from))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscapeWitness {
    pub word: String,
    #[serde(skip)]
    pub symbols: Word,
    pub length: usize,
    pub matrix: RatMatrix,
}

/// Shortest word (lexicographically first among those) of length at most
/// `horizon` whose matrix lies outside `v`.
pub fn escape_witness(
    v: &Variety,
    alphabet: &Alphabet,
    horizon: usize,
    limits: BallLimits,
) -> Result<Option<EscapeWitness>, VarietyError> {
    alphabet_elements(v, alphabet)?;
    let outside = |w: &Word, m: &RatMatrix| -> Result<Option<EscapeWitness>, VarietyError> {
        if v.ideal.vanishes_at(&v.ambient.point_of(m))? {
            return Ok(None);
        }
        Ok(Some(EscapeWitness {
            word: alphabet.format(w),
            symbols: w.clone(),
            length: w.len(),
            matrix: m.clone(),
        }))
    };
    let mut walker = BallWalker::new(alphabet, limits);
    loop {
        for (w, m) in walker.frontier() {
            if let Some(found) = outside(w, m)? {
                return Ok(Some(found));
            }
        }
        if walker.radius() >= horizon || walker.frontier().is_empty() {
            return Ok(None);
        }
        walker.next_level()?;
    }
}

/// Search radius `min(bound, cap)`.
pub fn capped_horizon(bound: &TowerInt, cap: usize) -> usize {
    match bound.le(&TowerInt::from_u64(cap as u64)) {
        Some(true) => bound.as_biguint().and_then(num_traits::ToPrimitive::to_usize).unwrap_or(cap),
        _ => cap,
    }
}

/// Whether `length ≤ M(profile)` in tower arithmetic.
pub fn within_escape_bound(length: usize, profile: &VarietyProfile) -> Result<bool, VarietyError> {
    TowerInt::from_u64(length as u64)
        .le(&escape_bound(profile))
        .ok_or_else(|| VarietyError::Domain("witness length and bound are incomparable".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Certainty;
    use crate::groups::fixtures;
    use crate::matrix::rat;

    fn sl2() -> Arc<AmbientGroup> {
        Arc::new(AmbientGroup::SpecialLinear(2))
    }

    fn trace_two() -> Variety {
        Variety::parse(sl2(), "x_1_1 + x_2_2 - 2").unwrap()
    }

    #[test]
    fn identity_translate_is_trivial() {
        let v = trace_two();
        let t = v.translate(&GroupElement::identity(sl2())).unwrap();
        assert!(t.same_as(&v).unwrap());
    }

    #[test]
    fn translate_membership_matches_action() {
        let v = trace_two();
        let g = GroupElement::from_i64_rows(&[&[1, 2], &[0, 1]]).unwrap();
        let gv = v.translate(&g).unwrap();
        let y = RatMatrix::from_i64_rows(&[&[3, -4], &[1, -1]]);
        assert!(v.contains_matrix(&y).unwrap());
        assert!(gv.contains_matrix(&g.matrix().mul(&y)).unwrap());
        assert!(!gv.contains_matrix(&y).unwrap());
        let back = gv.translate(&g.inverse()).unwrap();
        assert!(back.same_as(&v).unwrap());
    }

    #[test]
    fn intersection_with_self() {
        let v = trace_two();
        assert!(v.intersect(&v).unwrap().same_as(&v).unwrap());
        let other = Variety::ambient_only(Arc::new(AmbientGroup::SpecialLinear(3)));
        assert!(v.intersect(&other).is_err());
    }

    #[test]
    fn trace_two_profile() {
        let p = trace_two().profile_of().unwrap();
        let prof = *p.summary.profile().unwrap();
        assert_eq!((prof.irr, prof.mdeg, prof.d), (1, 2, 2));
        assert_eq!(prof.certainty, Certainty::Exact);
    }

    #[test]
    fn empty_profile() {
        let v = Variety::parse(sl2(), "x_1_2\nx_2_1\nx_1_1\n").unwrap();
        assert_eq!(v.profile_of().unwrap().summary, VarietySummary::Empty);
    }

    #[test]
    fn sanov_witness_and_tower() {
        let rep = fixtures::sanov();
        let alphabet = rep.alphabet().unwrap();
        let v = trace_two();
        let w = escape_witness(&v, &alphabet, 5, BallLimits::default()).unwrap().unwrap();
        assert_eq!(w.word, "ab");
        assert_eq!(w.matrix, RatMatrix::from_i64_rows(&[&[5, 2], &[2, 1]]));
        let tower = escape_tower(&v, &alphabet).unwrap();
        assert!(tower.final_variety.dimension().unwrap().value().unwrap_or(0) < 2);
        assert!(tower.within_irr_bound);
        assert!(tower.inequalities_hold);
    }

    #[test]
    fn identity_outside_gives_empty_word() {
        let v = Variety::parse(sl2(), "x_1_2 - 1").unwrap();
        let alphabet = fixtures::sanov().alphabet().unwrap();
        let w = escape_witness(&v, &alphabet, 0, BallLimits::default()).unwrap().unwrap();
        assert_eq!((w.word.as_str(), w.length), ("e", 0));
    }

    #[test]
    fn improper_variety_never_escapes() {
        let v = Variety::ambient_only(sl2());
        let alphabet = fixtures::sanov().alphabet().unwrap();
        assert!(escape_witness(&v, &alphabet, 3, BallLimits::default()).unwrap().is_none());
    }

    #[test]
    fn stabilized_variety_stalls() {
        // upper unitriangular matrices are preserved by left translation by a
        let v = Variety::parse(sl2(), "x_2_1\nx_1_1 - 1").unwrap();
        let a = Alphabet::new(vec!["a".into()], vec![RatMatrix::from_i64_rows(&[&[1, 2], &[0, 1]])], true)
            .unwrap();
        match escape_tower(&v, &a) {
            Err(VarietyError::EscapeStalled { provably_stable, .. }) => assert!(provably_stable),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_dimensional_tower_loses_points() {
        // the two points diag(1,1) and diag(-1,-1)
        let v = Variety::parse(sl2(), "x_1_2\nx_2_1\nx_1_1 - x_2_2\n").unwrap();
        let start = v.profile_of().unwrap();
        assert_eq!(start.top_components, Some(2));
        let g = GroupElement::from_i64_rows(&[&[1, 2], &[0, 1]]).unwrap();
        let w = v.intersect(&v.translate(&g).unwrap()).unwrap();
        assert_eq!(w.profile_of().unwrap().summary, VarietySummary::Empty);
        let p = rat(1);
        assert!(v.contains_matrix(&RatMatrix::diagonal(&[p.clone(), p])).unwrap());
    }

    #[test]
    fn horizon_capping() {
        assert_eq!(capped_horizon(&TowerInt::from_u64(18), 100), 18);
        assert_eq!(capped_horizon(&TowerInt::from_u64(1000), 100), 100);
    }
}
