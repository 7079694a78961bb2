//! Finite-step rigidity testing: compare spectra of two representations
//! over a word ball and, when they agree, recover a conjugating element.

mod compare;
mod conjugacy;

use serde::Serialize;
use thiserror::Error;

pub use compare::{compare_spectra, paired_ball, ComparisonReport, SeparatingWord, SpectraVerdict};
pub use conjugacy::{
    recover_affine_general, recover_affine_translation, recover_linear_conjugacy, Automorphism,
    CertificateKind, ConjugacyCertificate, Mode, RANK_THRESHOLD, SAMPLE_SEEDS,
};

use crate::bounds::{escape_bound, TowerInt, VarietyProfile};
use crate::groups::{BallLimits, GroupError, RepresentationSpec};
use crate::spectra::{spectrum_table, Invariant, SpectraError};
use crate::variety::capped_horizon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidityError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("word '{0}' is not loxodromic")]
    NonLoxodromicWord(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Default cap on the comparison radius.
pub const DEFAULT_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusChoice {
    /// `min(M(profile), cap)`.
    Profile(VarietyProfile),
    Explicit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    InconclusiveAtCap,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Equivalent => "EQUIVALENT",
            Verdict::NotEquivalent => "NOT_EQUIVALENT",
            Verdict::InconclusiveAtCap => "INCONCLUSIVE_AT_CAP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypotheses {
    pub zariski_dense_asserted: bool,
    pub all_words_loxodromic: bool,
    /// Affine pairs only: every translation norm in both balls is below the
    /// tolerance, the pattern of images inside a conjugate of the linear
    /// group. Evidence only, never a proof.
    pub translation_norms_vanish: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub radius_checked: usize,
    /// Escape bound of the supplied profile, as text, when one was given.
    pub radius_bound: Option<String>,
    pub capped: bool,
    pub comparison: ComparisonReport,
    pub recovery: Option<ConjugacyCertificate>,
    pub hypotheses: Hypotheses,
}

/// Recovery for a pair: a pure translation when the linear parts agree,
/// then an affine conjugator for affine pairs, a linear one otherwise.
pub fn recover_for(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    mode: Mode,
    tol: f64,
) -> Result<Option<ConjugacyCertificate>, RigidityError> {
    if rep1.is_affine() && rep2.is_affine() {
        let (l1, l2) = (rep1.linear_part()?, rep2.linear_part()?);
        let same_linear = l1.generators.iter().all(|g| l2.image(&g.name) == Some(&g.image));
        if same_linear {
            if let Some(c) = recover_affine_translation(rep1, rep2, mode, tol)? {
                return Ok(Some(c));
            }
        }
        return recover_affine_general(rep1, rep2, mode, tol);
    }
    recover_linear_conjugacy(rep1, rep2, mode, tol)
}

/// Compares at the chosen radius, then tries recovery when the spectra
/// agree. Equal spectra without a recovered conjugator are reported as
/// inconclusive.
pub fn rigidity_verdict(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    invariant: Invariant,
    radius: RadiusChoice,
    cap: usize,
    tol: f64,
    limits: BallLimits,
) -> Result<VerdictReport, RigidityError> {
    let (radius_checked, radius_bound, capped) = match radius {
        RadiusChoice::Explicit(r) => (r, None, false),
        RadiusChoice::Profile(p) => {
            let bound = escape_bound(&p);
            let r = capped_horizon(&bound, cap);
            let capped = bound.le(&TowerInt::from_u64(cap as u64)) != Some(true);
            (r, Some(bound.to_string()), capped)
        }
    };
    let comparison = compare_spectra(rep1, rep2, invariant, radius_checked, tol, limits)?;
    let hypotheses = Hypotheses {
        zariski_dense_asserted: rep1.assume_zariski_dense && rep2.assume_zariski_dense,
        all_words_loxodromic: comparison.all_loxodromic,
        translation_norms_vanish: translation_norms_vanish(rep1, rep2, radius_checked, tol, limits),
    };
    let (verdict, recovery) = match comparison.verdict {
        SpectraVerdict::Separated => (Verdict::NotEquivalent, None),
        SpectraVerdict::SpectraEqual => match recover_for(rep1, rep2, Mode::Exact, tol)? {
            Some(c) => (Verdict::Equivalent, Some(c)),
            None => (Verdict::InconclusiveAtCap, None),
        },
    };
    Ok(VerdictReport { verdict, radius_checked, radius_bound, capped, comparison, recovery, hypotheses })
}

fn translation_norms_vanish(
    rep1: &RepresentationSpec,
    rep2: &RepresentationSpec,
    radius: usize,
    tol: f64,
    limits: BallLimits,
) -> Option<bool> {
    if !rep1.is_affine() || !rep2.is_affine() {
        return None;
    }
    let mut all = true;
    for rep in [rep1, rep2] {
        let t = spectrum_table(rep, Invariant::MargulisNorm, radius, limits).ok()?;
        all &= t.rows.iter().filter_map(|r| r.values.as_ref()).all(|v| v.iter().all(|x| x.abs() <= tol));
    }
    Some(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::fixtures;
    use crate::matrix::{rat, RatMatrix, Rational};
    use num_traits::Zero;

    const TOL: f64 = 1e-8;

    fn proportional(a: &RatMatrix, b: &RatMatrix) -> bool {
        let k = (0..b.data().len()).find(|&k| !b.data()[k].is_zero()).unwrap();
        let r = &a.data()[k] / &b.data()[k];
        !r.is_zero() && a.data().iter().zip(b.data()).all(|(x, y)| *x == y * &r)
    }

    #[test]
    fn conjugate_pair_is_recovered_exactly() {
        let rep1 = fixtures::schottky();
        let c0 = RatMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let rep2 = rep1.conjugated_by(&c0).unwrap();
        let cmp = compare_spectra(&rep1, &rep2, Invariant::Jordan, 3, TOL, BallLimits::default()).unwrap();
        assert_eq!(cmp.verdict, SpectraVerdict::SpectraEqual);
        let cert = recover_linear_conjugacy(&rep1, &rep2, Mode::Exact, TOL).unwrap().unwrap();
        assert_eq!(cert.residual, 0.0);
        assert_eq!(cert.automorphism, Automorphism::Identity);
        assert!(proportional(cert.exact.as_ref().unwrap(), &c0));
        assert_eq!(cert.verify(&rep1, &rep2).unwrap(), 0.0);
        let num = recover_linear_conjugacy(&rep1, &rep2, Mode::Numeric, TOL).unwrap().unwrap();
        assert!(num.residual < TOL);
    }

    #[test]
    fn identical_reps_admit_identity() {
        let rep = fixtures::sanov();
        let cert = recover_linear_conjugacy(&rep, &rep, Mode::Exact, TOL).unwrap().unwrap();
        assert!(cert.exact.unwrap().is_identity());
    }

    #[test]
    fn perturbation_separates_early() {
        let rep1 = fixtures::schottky();
        let rep2 = fixtures::perturbed(&rep1, 0);
        let cmp = compare_spectra(&rep1, &rep2, Invariant::Jordan, 3, TOL, BallLimits::default()).unwrap();
        assert_eq!(cmp.verdict, SpectraVerdict::Separated);
        assert!(cmp.separating_word.as_ref().unwrap().length <= 3);
        let back = compare_spectra(&rep2, &rep1, Invariant::Jordan, 3, TOL, BallLimits::default()).unwrap();
        assert_eq!(back.separating_word.unwrap().word, cmp.separating_word.unwrap().word);
    }

    #[test]
    fn swapped_generators_have_no_conjugator() {
        let rep1 = fixtures::schottky();
        let rep2 = fixtures::swapped(&rep1);
        assert!(recover_linear_conjugacy(&rep1, &rep2, Mode::Exact, TOL).unwrap().is_none());
        assert!(recover_linear_conjugacy(&rep1, &rep2, Mode::Numeric, TOL).unwrap().is_none());
    }

    #[test]
    fn contragredient_is_probed() {
        let rep1 = fixtures::fuchsian(3);
        let gens = rep1
            .generators
            .iter()
            .map(|g| (g.name.clone(), g.image.matrix().transpose().inverse().unwrap()))
            .collect();
        let rep2 = RepresentationSpec::new(rep1.ambient.clone(), gens).unwrap();
        let cert = recover_linear_conjugacy(&rep1, &rep2, Mode::Exact, TOL).unwrap().unwrap();
        assert_eq!(cert.verify(&rep1, &rep2).unwrap(), 0.0);
    }

    #[test]
    fn translation_conjugacy_is_recovered() {
        let rep1 = fixtures::affine_so21(&[1, 2]);
        let mut w = RatMatrix::identity(4);
        let x0 = [rat(3), rat(-1), rat(5)];
        for i in 0..3 {
            w[(i, 3)] = x0[i].clone();
        }
        let rep2 = rep1.conjugated_by(&w).unwrap();
        let cert = recover_affine_translation(&rep1, &rep2, Mode::Exact, TOL).unwrap().unwrap();
        assert_eq!(cert.residual, 0.0);
        let x: Vec<Rational> = (0..3).map(|i| cert.exact.as_ref().unwrap()[(i, 3)].clone()).collect();
        for g in rep1.affine_generators().unwrap() {
            let r = g.linear().matrix();
            let lhs: Vec<Rational> = x.iter().zip(r.mul_vec(&x)).map(|(a, b)| a - b).collect();
            let rhs: Vec<Rational> = x0.iter().zip(r.mul_vec(&x0)).map(|(a, b)| a - b).collect();
            assert_eq!(lhs, rhs);
        }
        assert!(recover_affine_translation(&rep1, &rep1, Mode::Exact, TOL).unwrap().is_some());
    }

    #[test]
    fn neutral_cocycle_is_not_a_coboundary() {
        let rep1 = fixtures::affine_so21(&[1, 1]);
        let rep2 = fixtures::affine_so21_untranslated();
        assert!(recover_affine_translation(&rep1, &rep2, Mode::Exact, TOL).unwrap().is_none());
        assert!(recover_affine_general(&rep1, &rep2, Mode::Exact, TOL).unwrap().is_none());
    }

    #[test]
    fn affine_counterexample() {
        let rep1 = fixtures::affine_so21(&[1, 1]);
        let rep2 = fixtures::affine_so21_untranslated();
        let j = compare_spectra(&rep1, &rep2, Invariant::Jordan, 3, TOL, BallLimits::default()).unwrap();
        assert_eq!(j.verdict, SpectraVerdict::SpectraEqual);
        let m = compare_spectra(&rep1, &rep2, Invariant::MargulisNorm, 3, TOL, BallLimits::default()).unwrap();
        assert_eq!(m.verdict, SpectraVerdict::Separated);
        let v = rigidity_verdict(&rep1, &rep2, Invariant::Jordan, RadiusChoice::Explicit(3), DEFAULT_CAP, TOL, BallLimits::default())
            .unwrap();
        assert_eq!(v.verdict, Verdict::InconclusiveAtCap);
        assert!(!v.hypotheses.zariski_dense_asserted);
        // the translated fixture acts with nonzero translation norms
        assert_eq!(v.hypotheses.translation_norms_vanish, Some(false));
        let z = fixtures::affine_so21_untranslated();
        let zz = rigidity_verdict(&z, &z, Invariant::Jordan, RadiusChoice::Explicit(2), DEFAULT_CAP, TOL, BallLimits::default())
            .unwrap();
        assert_eq!(zz.hypotheses.translation_norms_vanish, Some(true));
    }

    #[test]
    fn verdicts_from_profile_radius() {
        let rep1 = fixtures::schottky();
        let rep2 = rep1.conjugated_by(&RatMatrix::from_i64_rows(&[&[2, 1], &[1, 1]])).unwrap();
        let p = VarietyProfile::exact(1, 2, 2).unwrap();
        let v = rigidity_verdict(&rep1, &rep2, Invariant::Jordan, RadiusChoice::Profile(p), DEFAULT_CAP, TOL, BallLimits::default())
            .unwrap();
        assert_eq!((v.verdict, v.radius_checked, v.capped), (Verdict::Equivalent, 4, true));
        let small = VarietyProfile::exact(1, 1, 0).unwrap();
        let v = rigidity_verdict(&rep1, &fixtures::perturbed(&rep1, 1), Invariant::Jordan, RadiusChoice::Profile(small), DEFAULT_CAP, TOL, BallLimits::default())
            .unwrap();
        assert_eq!((v.verdict, v.radius_checked), (Verdict::NotEquivalent, 1));
    }
}
