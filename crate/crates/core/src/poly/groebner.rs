//! Buchberger's algorithm with sugar pair selection.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};

use super::{divides, lcm_monomial, monomial_degree, Monomial, MonomialOrder, PolyError, Polynomial, Vars};
use crate::matrix::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerLimits {
    /// Maximum number of single-term reduction steps.
    pub max_steps: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits { max_steps: 500_000 }
    }
}

/// Monomial keyed by a runtime order, so that a `BTreeMap` sorts terms.
#[derive(Clone, Debug)]
struct Key {
    exps: Monomial,
    order: MonomialOrder,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.cmp(&self.exps, &other.exps)
    }
}

/// Basis element: monic, terms sorted decreasingly.
#[derive(Clone, Debug)]
struct Elem {
    terms: Vec<(Monomial, Rational)>,
    sugar: u64,
}

impl Elem {
    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }
}

struct Reducer<'a> {
    order: MonomialOrder,
    steps: &'a mut usize,
    limit: usize,
}

impl Reducer<'_> {
    /// Full normal form of `p` against `basis` (every term reduced).
    fn normal_form(
        &mut self,
        p: BTreeMap<Key, Rational>,
        basis: &[&Elem],
    ) -> Result<Vec<(Monomial, Rational)>, PolyError> {
        let mut work = p;
        let mut rem: Vec<(Monomial, Rational)> = Vec::new();
        while let Some((k, c)) = work.pop_last() {
            let Some(g) = basis.iter().find(|g| divides(g.lm(), &k.exps)) else {
                rem.push((k.exps, c));
                continue;
            };
            *self.steps += 1;
            if *self.steps > self.limit {
                return Err(PolyError::Aborted { steps: *self.steps, limit: self.limit });
            }
            let shift: Monomial = k.exps.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
            for (e, gc) in &g.terms[1..] {
                let m: Monomial = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
                let key = Key { exps: m, order: self.order };
                let delta = -(&c * gc);
                match work.entry(key) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(delta);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += delta;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                }
            }
        }
        Ok(rem)
    }
}

fn to_work(p: &Polynomial, order: MonomialOrder) -> BTreeMap<Key, Rational> {
    p.terms().map(|(e, c)| (Key { exps: e.clone(), order }, c.clone())).collect()
}

fn make_monic(mut terms: Vec<(Monomial, Rational)>) -> Vec<(Monomial, Rational)> {
    if let Some((_, lc)) = terms.first() {
        let inv = lc.recip();
        for (_, c) in terms.iter_mut() {
            *c *= &inv;
        }
    }
    terms
}

fn spoly_work(f: &Elem, g: &Elem, order: MonomialOrder) -> BTreeMap<Key, Rational> {
    let l = lcm_monomial(f.lm(), g.lm());
    let mut out: BTreeMap<Key, Rational> = BTreeMap::new();
    for (src, sign) in [(f, Rational::one()), (g, -Rational::one())] {
        let shift: Monomial = l.iter().zip(src.lm()).map(|(a, b)| a - b).collect();
        for (e, c) in &src.terms {
            let m: Monomial = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let v = out.entry(Key { exps: m, order }).or_insert_with(Rational::zero);
            *v += c * &sign;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u64,
}

fn pair_sugar(f: &Elem, g: &Elem, lcm: &[u32]) -> u64 {
    let d = monomial_degree(lcm);
    (f.sugar + d - monomial_degree(f.lm())).max(g.sugar + d - monomial_degree(g.lm()))
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

/// Reduced Gröbner basis in content-free integer form, sorted by decreasing
/// leading monomial. The unit ideal yields `[1]`; the zero ideal yields `[]`.
pub(crate) fn reduced_basis(
    vars: &Vars,
    gens: &[Polynomial],
    order: MonomialOrder,
    limits: GroebnerLimits,
) -> Result<Vec<Polynomial>, PolyError> {
    let mut steps = 0usize;
    let mut red = Reducer { order, steps: &mut steps, limit: limits.max_steps };
    let mut basis: Vec<Elem> = Vec::new();
    let mut pending: Vec<Pair> = Vec::new();
    let mut pending_set: HashSet<(usize, usize)> = HashSet::new();

    let mut inputs: Vec<&Polynomial> = gens.iter().filter(|p| !p.is_zero()).collect();
    inputs.sort_by(|a, b| {
        let (la, lb) = (a.leading_monomial(order).unwrap(), b.leading_monomial(order).unwrap());
        order.cmp(la, lb)
    });
    let unit = || Ok(vec![Polynomial::one(vars.clone())]);

    let mut queue: Vec<(Vec<(Monomial, Rational)>, u64)> = Vec::new();
    for p in inputs {
        let terms = make_monic(p.sorted_terms(order));
        queue.push((terms, p.total_degree() as u64));
    }

    let add = |terms: Vec<(Monomial, Rational)>,
               sugar: u64,
               basis: &mut Vec<Elem>,
               pending: &mut Vec<Pair>,
               pending_set: &mut HashSet<(usize, usize)>| {
        let e = Elem { terms, sugar };
        let m = basis.len();
        for (i, g) in basis.iter().enumerate() {
            if coprime(g.lm(), e.lm()) {
                continue;
            }
            let l = lcm_monomial(g.lm(), e.lm());
            let s = pair_sugar(g, &e, &l);
            pending.push(Pair { i, j: m, lcm: l, sugar: s });
            pending_set.insert((i, m));
        }
        // redundant elements stay until the end so pair indices remain valid
        basis.push(e);
    };

    for (terms, sugar) in queue {
        let refs: Vec<&Elem> = basis.iter().collect();
        let work: BTreeMap<Key, Rational> =
            terms.into_iter().map(|(e, c)| (Key { exps: e, order }, c)).collect();
        let mut nf = red.normal_form(work, &refs)?;
        if nf.is_empty() {
            continue;
        }
        nf.sort_by(|a, b| order.cmp(&b.0, &a.0));
        if nf[0].0.iter().all(|&x| x == 0) {
            return unit();
        }
        add(make_monic(nf), sugar, &mut basis, &mut pending, &mut pending_set);
    }

    while !pending.is_empty() {
        let best = (0..pending.len())
            .min_by(|&x, &y| {
                let (p, q) = (&pending[x], &pending[y]);
                p.sugar
                    .cmp(&q.sugar)
                    .then_with(|| order.cmp(&p.lcm, &q.lcm))
                    .then_with(|| (p.i, p.j).cmp(&(q.i, q.j)))
            })
            .unwrap();
        let pair = pending.swap_remove(best);
        pending_set.remove(&(pair.i, pair.j));

        // chain criterion
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && divides(basis[k].lm(), &pair.lcm)
                && !pending_set.contains(&(pair.i.min(k), pair.i.max(k)))
                && !pending_set.contains(&(pair.j.min(k), pair.j.max(k)))
        });
        if chain {
            continue;
        }

        let work = spoly_work(&basis[pair.i], &basis[pair.j], order);
        let refs: Vec<&Elem> = basis.iter().collect();
        let mut nf = red.normal_form(work, &refs)?;
        if nf.is_empty() {
            continue;
        }
        nf.sort_by(|a, b| order.cmp(&b.0, &a.0));
        if nf[0].0.iter().all(|&x| x == 0) {
            return unit();
        }
        add(make_monic(nf), pair.sugar, &mut basis, &mut pending, &mut pending_set);
    }

    // minimalize
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let redundant = (0..basis.len()).any(|j| {
            j != i
                && divides(basis[j].lm(), basis[i].lm())
                && (basis[j].lm() != basis[i].lm() || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let minimal: Vec<Elem> = keep.iter().map(|&i| basis[i].clone()).collect();

    // interreduce tails
    let mut out = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others: Vec<&Elem> =
            minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e).collect();
        let tail: BTreeMap<Key, Rational> = g.terms[1..]
            .iter()
            .map(|(e, c)| (Key { exps: e.clone(), order }, c.clone()))
            .collect();
        let nf = red.normal_form(tail, &others)?;
        let mut terms = vec![g.terms[0].clone()];
        terms.extend(nf);
        out.push(Polynomial::from_terms(vars.clone(), terms).primitive(order));
    }
    out.sort_by(|a, b| {
        order.cmp(b.leading_monomial(order).unwrap(), a.leading_monomial(order).unwrap())
    });
    Ok(out)
}

/// Normal form of `p` modulo a list of polynomials (full reduction).
pub(crate) fn normal_form(
    p: &Polynomial,
    basis: &[Polynomial],
    order: MonomialOrder,
    limits: GroebnerLimits,
) -> Result<Polynomial, PolyError> {
    let elems: Vec<Elem> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| Elem { terms: make_monic(g.sorted_terms(order)), sugar: 0 })
        .collect();
    let refs: Vec<&Elem> = elems.iter().collect();
    let mut steps = 0;
    let mut red = Reducer { order, steps: &mut steps, limit: limits.max_steps };
    let nf = red.normal_form(to_work(p, order), &refs)?;
    Ok(Polynomial::from_terms(p.vars().clone(), nf))
}

/// S-polynomial `lcm/lt(f)·f − lcm/lt(g)·g` of two nonzero polynomials.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: MonomialOrder) -> Polynomial {
    let ef = Elem { terms: make_monic(f.sorted_terms(order)), sugar: 0 };
    let eg = Elem { terms: make_monic(g.sorted_terms(order)), sugar: 0 };
    let w = spoly_work(&ef, &eg, order);
    Polynomial::from_terms(f.vars().clone(), w.into_iter().map(|(k, c)| (k.exps, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, vars};

    fn basis_strings(src: &[&str], names: &[&str], order: MonomialOrder) -> Vec<String> {
        let v = vars(names);
        let gens: Vec<Polynomial> = src.iter().map(|s| parse_polynomial(s, &v).unwrap()).collect();
        reduced_basis(&v, &gens, order, GroebnerLimits::default())
            .unwrap()
            .iter()
            .map(|p| p.display_with(order))
            .collect()
    }

    #[test]
    fn already_reduced_basis() {
        assert_eq!(basis_strings(&["x", "y"], &["x", "y"], MonomialOrder::Lex), ["x", "y"]);
    }

    #[test]
    fn circle_and_line() {
        assert_eq!(
            basis_strings(&["x^2 + y^2 - 1", "x - y"], &["x", "y"], MonomialOrder::Lex),
            ["x - y", "2*y^2 - 1"]
        );
    }

    #[test]
    fn inconsistent_system_is_unit() {
        assert_eq!(basis_strings(&["x*y - 1", "x"], &["x", "y"], MonomialOrder::GrevLex), ["1"]);
    }

    #[test]
    fn cyclic3_spolys_reduce() {
        let v = vars(&["x", "y", "z"]);
        let gens: Vec<Polynomial> = ["x + y + z", "x*y + y*z + z*x", "x*y*z - 1"]
            .iter()
            .map(|s| parse_polynomial(s, &v).unwrap())
            .collect();
        for order in [MonomialOrder::Lex, MonomialOrder::GrevLex] {
            let g = reduced_basis(&v, &gens, order, GroebnerLimits::default()).unwrap();
            for a in &g {
                for b in &g {
                    let s = s_polynomial(a, b, order);
                    assert!(normal_form(&s, &g, order, GroebnerLimits::default()).unwrap().is_zero());
                }
            }
            for p in &gens {
                assert!(normal_form(p, &g, order, GroebnerLimits::default()).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn step_cap_aborts() {
        let v = vars(&["x", "y", "z"]);
        let gens: Vec<Polynomial> = ["x^3 + y^2*z - 3", "y^3 - x*z^2 + 1", "z^3 + x*y - 2"]
            .iter()
            .map(|s| parse_polynomial(s, &v).unwrap())
            .collect();
        let r = reduced_basis(&v, &gens, MonomialOrder::Lex, GroebnerLimits { max_steps: 10 });
        assert!(matches!(r, Err(PolyError::Aborted { .. })));
    }
}
