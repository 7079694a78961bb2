//! Invariant values over a word ball.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::margulis::{margulis_invariant, margulis_norm, Weights};
use super::{cartan, jordan, SpectraError};
use crate::groups::{ball_with_limits, AffineElement, BallLimits, GroupElement, RepresentationSpec};
use crate::matrix::RatMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invariant {
    Cartan,
    Jordan,
    Margulis,
    MargulisNorm,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::Cartan => "cartan",
            Invariant::Jordan => "jordan",
            Invariant::Margulis => "margulis",
            Invariant::MargulisNorm => "margulis-norm",
        }
    }

    pub fn needs_affine(self) -> bool {
        matches!(self, Invariant::Margulis | Invariant::MargulisNorm)
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Invariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cartan" => Ok(Invariant::Cartan),
            "jordan" => Ok(Invariant::Jordan),
            "margulis" => Ok(Invariant::Margulis),
            "margulis-norm" | "margulis_norm" => Ok(Invariant::MargulisNorm),
            other => Err(format!("unknown invariant '{other}'")),
        }
    }
}

/// Value of an invariant at one element of the representation's image.
pub fn evaluate_invariant(
    rep: &RepresentationSpec,
    inv: Invariant,
    m: &RatMatrix,
) -> Result<Vec<f64>, SpectraError> {
    match inv {
        Invariant::Cartan => Ok(cartan(m)?.entries),
        Invariant::Jordan => Ok(jordan(m)?.entries),
        Invariant::Margulis | Invariant::MargulisNorm => {
            if !rep.is_affine() {
                return Err(SpectraError::Domain(format!("{inv} needs an affine representation")));
            }
            let e = AffineElement::from_embedded(&GroupElement::new(rep.ambient.clone(), m.clone())?)?;
            let form = rep.invariant_form.as_ref();
            if inv == Invariant::MargulisNorm {
                return Ok(vec![margulis_norm(&e, form)?]);
            }
            let weights = Weights::infer(e.linear().matrix());
            Ok(margulis_invariant(&e, &weights, form)?.vector)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub word: String,
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub invariant: Invariant,
    pub radius: usize,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    /// Smallest consecutive gap among the Jordan rows, a uniform-gap proxy.
    pub fn min_gap(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.length > 0)
            .filter_map(|r| r.values.as_ref())
            .map(|v| v.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min))
            .reduce(f64::min)
    }
}

/// Rows sorted by word length then word; the identity is skipped for the
/// translation invariants, and elements where an invariant is undefined get
/// a note instead of values.
pub fn spectrum_table(
    rep: &RepresentationSpec,
    inv: Invariant,
    radius: usize,
    limits: BallLimits,
) -> Result<SpectrumTable, SpectraError> {
    if inv.needs_affine() && !rep.is_affine() {
        return Err(SpectraError::Domain(format!("{inv} needs an affine representation")));
    }
    let b = ball_with_limits(rep, radius, limits)?;
    let entries = b.sorted();
    let rows = entries
        .par_iter()
        .map(|(w, m)| {
            let word = b.alphabet().format(w);
            if w.is_empty() && inv.needs_affine() {
                return SpectrumRow { word, length: 0, values: None, note: Some("identity".into()) };
            }
            match evaluate_invariant(rep, inv, m) {
                Ok(v) => SpectrumRow { word, length: w.len(), values: Some(v), note: None },
                Err(e) => SpectrumRow { word, length: w.len(), values: None, note: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(SpectrumTable { invariant: inv, radius, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::fixtures;

    #[test]
    fn jordan_table_is_sorted() {
        let t = spectrum_table(&fixtures::schottky(), Invariant::Jordan, 2, BallLimits::default()).unwrap();
        assert_eq!(t.rows.len(), 17);
        assert_eq!(t.rows[0].word, "e");
        assert!(t.rows.windows(2).all(|w| w[0].length <= w[1].length));
        assert!(t.min_gap().unwrap() > 0.0);
    }

    #[test]
    fn margulis_norm_needs_affine() {
        let r = spectrum_table(&fixtures::schottky(), Invariant::MargulisNorm, 1, BallLimits::default());
        assert!(matches!(r, Err(SpectraError::Domain(_))));
        let t = spectrum_table(&fixtures::affine_so21(&[1, 1]), Invariant::MargulisNorm, 2, BallLimits::default())
            .unwrap();
        assert_eq!(t.rows[0].note.as_deref(), Some("identity"));
        assert!(t.rows[1..].iter().all(|r| r.values.as_ref().is_some_and(|v| v[0] > 0.0)));
    }

    #[test]
    fn invariant_names_round_trip() {
        for inv in [Invariant::Cartan, Invariant::Jordan, Invariant::Margulis, Invariant::MargulisNorm] {
            assert_eq!(inv.name().parse::<Invariant>().unwrap(), inv);
        }
    }
}
