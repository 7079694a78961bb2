use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::ToPrimitive;
use serde::Serialize;

use super::decompose::{self, Component};
use super::groebner::{self, GroebnerLimits};
use super::hilbert;
use super::{MonomialOrder, PolyError, Polynomial, Vars};
use crate::matrix::Rational;

/// Krull dimension of an affine variety, or the empty marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Dimension {
    Empty,
    Dim(usize),
}

impl Dimension {
    pub fn value(self) -> Option<usize> {
        match self {
            Dimension::Empty => None,
            Dimension::Dim(d) => Some(d),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Empty => f.write_str("EMPTY"),
            Dimension::Dim(d) => write!(f, "{d}"),
        }
    }
}

/// Polynomial ideal with a lazily computed reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct Ideal {
    vars: Vars,
    generators: Vec<Polynomial>,
    order: MonomialOrder,
    limits: GroebnerLimits,
    cache: Arc<OnceLock<Vec<Polynomial>>>,
}

impl Ideal {
    pub fn new(vars: Vars, generators: Vec<Polynomial>) -> Self {
        let generators = generators
            .into_iter()
            .filter(|p| !p.is_zero())
            .map(|p| {
                assert!(p.vars() == &vars, "generator over a different variable list");
                p
            })
            .collect();
        Ideal {
            vars,
            generators,
            order: MonomialOrder::default(),
            limits: GroebnerLimits::default(),
            cache: Arc::new(OnceLock::new()),
        }
    }

    pub fn zero(vars: Vars) -> Self {
        Self::new(vars, vec![])
    }

    pub fn with_order(mut self, order: MonomialOrder) -> Self {
        if order != self.order {
            self.order = order;
            self.cache = Arc::new(OnceLock::new());
        }
        self
    }

    pub fn with_limits(mut self, limits: GroebnerLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn limits(&self) -> GroebnerLimits {
        self.limits
    }

    pub fn is_cached(&self) -> bool {
        self.cache.get().is_some()
    }

    /// Reduced Gröbner basis for the ideal's order, computed once.
    pub fn basis(&self) -> Result<&[Polynomial], PolyError> {
        if let Some(b) = self.cache.get() {
            return Ok(b);
        }
        let b = groebner::reduced_basis(&self.vars, &self.generators, self.order, self.limits)?;
        let _ = self.cache.set(b);
        Ok(self.cache.get().expect("cache was just filled"))
    }

    /// The same ideal presented by its reduced Gröbner basis, cache filled.
    pub fn groebner(&self) -> Result<Ideal, PolyError> {
        let b = self.basis()?.to_vec();
        let cache = OnceLock::new();
        let _ = cache.set(b.clone());
        Ok(Ideal {
            vars: self.vars.clone(),
            generators: b,
            order: self.order,
            limits: self.limits,
            cache: Arc::new(cache),
        })
    }

    pub fn is_unit(&self) -> Result<bool, PolyError> {
        Ok(self.basis()?.iter().any(|p| !p.is_zero() && p.is_constant()))
    }

    pub fn reduce(&self, p: &Polynomial) -> Result<Polynomial, PolyError> {
        groebner::normal_form(p, self.basis()?, self.order, self.limits)
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool, PolyError> {
        Ok(self.reduce(p)?.is_zero())
    }

    /// Whether every generator vanishes at `point` (exact).
    pub fn vanishes_at(&self, point: &[Rational]) -> Result<bool, PolyError> {
        for g in &self.generators {
            if !num_traits::Zero::is_zero(&g.evaluate(point)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Ideal generated by both generator sets.
    pub fn join(&self, other: &Ideal) -> Ideal {
        assert!(self.vars == other.vars, "ideals over different variable lists");
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Ideal::new(self.vars.clone(), gens).with_order(self.order).with_limits(self.limits)
    }

    pub fn with_generator(&self, p: Polynomial) -> Ideal {
        let mut gens = self.generators.clone();
        gens.push(p);
        Ideal::new(self.vars.clone(), gens).with_order(self.order).with_limits(self.limits)
    }

    /// Equality as ideals, by comparing reduced bases.
    pub fn same_ideal(&self, other: &Ideal) -> Result<bool, PolyError> {
        let o = other.clone().with_order(self.order);
        Ok(self.basis()? == o.basis()?)
    }

    fn leading_monomials(&self) -> Result<Vec<Vec<u32>>, PolyError> {
        Ok(self
            .basis()?
            .iter()
            .map(|p| p.leading_monomial(self.order).expect("basis elements are nonzero").clone())
            .collect())
    }

    pub fn dimension(&self) -> Result<Dimension, PolyError> {
        if self.is_unit()? {
            return Ok(Dimension::Empty);
        }
        let lms = self.leading_monomials()?;
        Ok(Dimension::Dim(hilbert::max_independent_set(&lms, self.vars.len())))
    }

    /// Affine degree: leading coefficient data of the affine Hilbert function,
    /// read from a graded-reverse-lexicographic leading-term ideal.
    pub fn degree(&self) -> Result<u64, PolyError> {
        let graded = if self.order == MonomialOrder::GrevLex {
            self.clone()
        } else {
            self.clone().with_order(MonomialOrder::GrevLex)
        };
        if graded.is_unit()? {
            return Err(PolyError::UnitIdeal);
        }
        let lms = graded.leading_monomials()?;
        let num = hilbert::numerator(&lms);
        hilbert::multiplicity_at_one(&num)
            .to_u64()
            .ok_or_else(|| PolyError::Domain("degree exceeds 64 bits".into()))
    }

    /// Component decomposition on the supported class.
    pub fn decompose(&self) -> Result<Vec<Component>, PolyError> {
        decompose::decompose(self)
    }

    /// Bezout-style bound: product of the generator total degrees.
    pub fn bezout_bound(&self) -> u64 {
        self.generators
            .iter()
            .map(|g| g.total_degree().max(1) as u64)
            .fold(1u64, |acc, d| acc.saturating_mul(d))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.generators.iter().map(|p| p.display_with(self.order)).collect();
        write!(f, "<{}>", g.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, vars};

    fn ideal(src: &[&str], names: &[&str]) -> Ideal {
        let v = vars(names);
        Ideal::new(v.clone(), src.iter().map(|s| parse_polynomial(s, &v).unwrap()).collect())
    }

    const ABCD: [&str; 4] = ["a", "b", "c", "d"];

    #[test]
    fn dimension_examples() {
        assert_eq!(ideal(&[], &ABCD).dimension().unwrap(), Dimension::Dim(4));
        assert_eq!(ideal(&["a*d - b*c - 1"], &ABCD).dimension().unwrap(), Dimension::Dim(3));
        assert_eq!(ideal(&["1"], &ABCD).dimension().unwrap(), Dimension::Empty);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(ideal(&["a - 1"], &ABCD).degree().unwrap(), 1);
        assert_eq!(ideal(&["a*d - b*c - 1"], &ABCD).degree().unwrap(), 2);
        assert_eq!(ideal(&["a*d - b*c - 1", "a + d - 2"], &ABCD).degree().unwrap(), 2);
        assert_eq!(ideal(&["x^2 + y^2 - 1", "x - y"], &["x", "y"]).degree().unwrap(), 2);
        assert!(matches!(ideal(&["1"], &ABCD).degree(), Err(PolyError::UnitIdeal)));
    }

    #[test]
    fn cached_membership_matches_fresh() {
        let i = ideal(&["a*d - b*c - 1", "a + d - 2"], &ABCD);
        let v = i.vars().clone();
        let p = parse_polynomial("(a + d - 2)*(b - 3) + c*(a*d - b*c - 1)", &v).unwrap();
        assert!(i.contains(&p).unwrap());
        let fresh = ideal(&["a*d - b*c - 1", "a + d - 2"], &ABCD);
        assert_eq!(fresh.contains(&p).unwrap(), i.groebner().unwrap().contains(&p).unwrap());
        assert!(i.groebner().unwrap().is_cached());
    }

    #[test]
    fn groebner_is_idempotent() {
        let i = ideal(&["x^2 + y^2 - 1", "x - y"], &["x", "y"]).with_order(MonomialOrder::Lex);
        let g = i.groebner().unwrap();
        let again = Ideal::new(g.vars().clone(), g.generators().to_vec()).with_order(MonomialOrder::Lex);
        assert_eq!(again.basis().unwrap(), g.generators());
    }
}
