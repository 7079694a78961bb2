//! Component decomposition for a restricted class of ideals.
//!
//! Supported: ideals that become principal or zero-dimensional after
//! eliminating variables through affine-linear basis elements, where the
//! principal generator factors into monomials, univariate parts and a
//! polynomial of total degree at most two.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::univariate::UniPoly;
use super::{Ideal, MonomialOrder, PolyError, Polynomial};
use crate::matrix::{RatMatrix, Rational};

/// A union of irreducible components over the complex numbers that share a
/// dimension and a degree, cut out by `ideal`.
#[derive(Clone, Debug)]
pub struct Component {
    pub ideal: Ideal,
    pub dimension: usize,
    /// Degree of each irreducible piece.
    pub degree: u64,
    /// Number of irreducible pieces bundled in this component.
    pub geometric_count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub dimension: usize,
    pub degree: u64,
    pub geometric_count: u64,
}

impl Component {
    pub fn summary(&self) -> ComponentSummary {
        ComponentSummary {
            dimension: self.dimension,
            degree: self.degree,
            geometric_count: self.geometric_count,
        }
    }
}

struct Piece {
    gens: Vec<Polynomial>,
    degree: u64,
    count: u64,
}

fn unsupported(msg: impl Into<String>) -> PolyError {
    PolyError::UnsupportedDecomposition(msg.into())
}

fn is_affine_linear(p: &Polynomial) -> bool {
    p.total_degree() == 1
}

pub(crate) fn decompose(ideal: &Ideal) -> Result<Vec<Component>, PolyError> {
    let vars = ideal.vars().clone();
    let n = vars.len();
    let order = MonomialOrder::GrevLex;
    let base = ideal.clone().with_order(order);
    if base.is_unit()? {
        return Ok(vec![]);
    }

    // eliminate variables through affine-linear basis elements
    let mut linear: Vec<Polynomial> = Vec::new();
    let mut eliminated = vec![false; n];
    let mut current: Vec<Polynomial> = base.basis()?.to_vec();
    while let Some(pos) = current.iter().position(is_affine_linear) {
        let g = current.remove(pos);
        let x = g.support()[0];
        let mut e = vec![0; n];
        e[x] = 1;
        let c = g.coefficient(&e);
        // x = -(g - c x) / c
        let rest = g.sub(&Polynomial::monomial(vars.clone(), e, c.clone()));
        let image = rest.scale(&(-c.recip()));
        let images: Vec<Polynomial> = (0..n)
            .map(|i| if i == x { image.clone() } else { Polynomial::var(vars.clone(), i) })
            .collect();
        current = current
            .iter()
            .map(|p| p.substitute(&images, vars.clone()))
            .filter(|p| !p.is_zero())
            .collect();
        linear = linear.iter().map(|p| p.substitute(&images, vars.clone())).collect();
        linear.push(g.primitive(order));
        eliminated[x] = true;
        let reduced = Ideal::new(vars.clone(), current.clone()).with_limits(ideal.limits());
        if reduced.is_unit()? {
            return Ok(vec![]);
        }
        current = reduced.basis()?.to_vec();
    }
    // re-substitute so each linear equation only involves later-surviving variables
    let free = eliminated.iter().filter(|&&e| !e).count();

    let assemble = |pieces: Vec<Piece>, dimension: usize| -> Vec<Component> {
        pieces
            .into_iter()
            .map(|p| {
                let mut gens = linear.clone();
                gens.extend(p.gens);
                Component {
                    ideal: Ideal::new(vars.clone(), gens).with_limits(ideal.limits()),
                    dimension,
                    degree: p.degree,
                    geometric_count: p.count,
                }
            })
            .collect()
    };

    if current.is_empty() {
        return Ok(assemble(vec![Piece { gens: vec![], degree: 1, count: 1 }], free));
    }
    if current.len() == 1 {
        let pieces = principal(&current[0])?;
        return Ok(assemble(pieces, free - 1));
    }
    let rest = Ideal::new(vars.clone(), current.clone()).with_limits(ideal.limits());
    let dim = rest.dimension()?.value().unwrap_or(0);
    // eliminated variables do not occur and count as independent
    if dim == n - free {
        let radical = zero_dimensional_radical(&rest, &eliminated)?;
        let points = radical.degree()?;
        return Ok(assemble(
            vec![Piece { gens: radical.generators().to_vec(), degree: 1, count: points }],
            0,
        ));
    }
    Err(unsupported(format!(
        "{} generators of positive dimension after linear elimination",
        current.len()
    )))
}

/// Radical of a zero-dimensional ideal by adjoining square-free parts of the
/// univariate minimal polynomials of each surviving variable.
fn zero_dimensional_radical(ideal: &Ideal, skip: &[bool]) -> Result<Ideal, PolyError> {
    let vars = ideal.vars().clone();
    let mut gens = ideal.basis()?.to_vec();
    for (x, &s) in skip.iter().enumerate() {
        if s {
            continue;
        }
        let min = minimal_polynomial(ideal, x)?;
        gens.push(min.squarefree_part().to_poly(vars.clone(), x));
    }
    let radical = Ideal::new(vars, gens).with_limits(ideal.limits());
    radical.groebner()
}

/// Monic generator of `I ∩ Q[x]` for a zero-dimensional ideal.
fn minimal_polynomial(ideal: &Ideal, x: usize) -> Result<UniPoly, PolyError> {
    let vars = ideal.vars().clone();
    let mut forms: Vec<Polynomial> = Vec::new();
    let mut power = Polynomial::one(vars.clone());
    let xv = Polynomial::var(vars.clone(), x);
    loop {
        forms.push(ideal.reduce(&power)?);
        let mut monos: Vec<Vec<u32>> =
            forms.iter().flat_map(|f| f.terms().map(|(e, _)| e.clone())).collect();
        monos.sort();
        monos.dedup();
        let mut m = RatMatrix::zeros(monos.len(), forms.len());
        for (j, f) in forms.iter().enumerate() {
            for (e, c) in f.terms() {
                let i = monos.binary_search(e).expect("monomial collected above");
                m[(i, j)] = c.clone();
            }
        }
        if let Some(v) = m.nullspace().into_iter().next() {
            return Ok(UniPoly::new(v).monic());
        }
        power = power.mul(&xv);
        if forms.len() > 4096 {
            return Err(unsupported("minimal polynomial degree exceeds 4096"));
        }
    }
}

fn principal(f: &Polynomial) -> Result<Vec<Piece>, PolyError> {
    let vars = f.vars().clone();
    let n = vars.len();
    let mut pieces = Vec::new();

    // monomial content
    let mut content = vec![u32::MAX; n];
    for (e, _) in f.terms() {
        for (c, &k) in content.iter_mut().zip(e) {
            *c = (*c).min(k);
        }
    }
    let mut rest = f.clone();
    if content.iter().any(|&k| k > 0 && k != u32::MAX) {
        rest = Polynomial::from_terms(
            vars.clone(),
            f.terms().map(|(e, c)| (e.iter().zip(&content).map(|(a, b)| a - b).collect(), c.clone())),
        );
        for (i, &k) in content.iter().enumerate() {
            if k > 0 {
                pieces.push(Piece { gens: vec![Polynomial::var(vars.clone(), i)], degree: 1, count: 1 });
            }
        }
    }
    if rest.is_constant() {
        return Ok(pieces);
    }

    let support = rest.support();
    if support.len() == 1 {
        let x = support[0];
        let u = UniPoly::from_poly(&rest, x).expect("single-variable support");
        let s = u.squarefree_part();
        let (roots, _) = s.rational_roots();
        let mut remaining = s.clone();
        for r in &roots {
            let lin = UniPoly::new(vec![-r.clone(), Rational::one()]);
            remaining = remaining.div_rem(&lin).0;
            pieces.push(Piece {
                gens: vec![lin.to_poly(vars.clone(), x).primitive(MonomialOrder::GrevLex)],
                degree: 1,
                count: 1,
            });
        }
        if remaining.degree() > 0 {
            pieces.push(Piece {
                gens: vec![remaining.to_poly(vars.clone(), x).primitive(MonomialOrder::GrevLex)],
                degree: 1,
                count: remaining.degree() as u64,
            });
        }
        return Ok(pieces);
    }

    match rest.total_degree() {
        1 => pieces.push(Piece { gens: vec![rest.primitive(MonomialOrder::GrevLex)], degree: 1, count: 1 }),
        2 => pieces.extend(quadric(&rest, &support)),
        d => {
            return Err(unsupported(format!(
                "multivariate factor of total degree {d} outside the supported class"
            )))
        }
    }
    Ok(pieces)
}

/// Symmetric matrix of the homogenized quadric over `support` plus a
/// homogenizing coordinate in the last slot.
fn quadric_matrix(q: &Polynomial, support: &[usize]) -> RatMatrix {
    let m = support.len();
    let mut s = RatMatrix::zeros(m + 1, m + 1);
    let half = Rational::new(1.into(), 2.into());
    let slot = |e: &[u32]| -> Vec<usize> {
        let mut v = Vec::new();
        for (k, &i) in support.iter().enumerate() {
            for _ in 0..e[i] {
                v.push(k);
            }
        }
        while v.len() < 2 {
            v.push(m);
        }
        v
    };
    for (e, c) in q.terms() {
        let v = slot(e);
        let (i, j) = (v[0], v[1]);
        if i == j {
            s[(i, i)] += c;
        } else {
            let h = c * &half;
            s[(i, j)] += &h;
            s[(j, i)] += h;
        }
    }
    s
}

fn linear_form(coeffs: &[Rational], support: &[usize], q: &Polynomial) -> Polynomial {
    let vars = q.vars().clone();
    let n = vars.len();
    let m = support.len();
    let mut terms = Vec::new();
    for (k, &i) in support.iter().enumerate() {
        let mut e = vec![0; n];
        e[i] = 1;
        terms.push((e, coeffs[k].clone()));
    }
    terms.push((vec![0; n], coeffs[m].clone()));
    Polynomial::from_terms(vars, terms).primitive(MonomialOrder::GrevLex)
}

/// Square root of a nonnegative rational if it is rational.
fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Rank-one symmetric `s = c·m·mᵀ`: returns `(c, m)` with a unit entry in `m`.
fn rank_one_factor(s: &RatMatrix) -> (Rational, Vec<Rational>) {
    let k = (0..s.rows()).find(|&k| !s[(k, k)].is_zero()).expect("rank-one symmetric has a nonzero diagonal");
    let c = s[(k, k)].clone();
    let m = s.row(k).iter().map(|x| x / &c).collect();
    (c, m)
}

fn quadric(q: &Polynomial, support: &[usize]) -> Vec<Piece> {
    let s = quadric_matrix(q, support);
    let whole = || Piece { gens: vec![q.primitive(MonomialOrder::GrevLex)], degree: 2, count: 1 };
    match s.rank() {
        0 => vec![],
        1 => {
            let (_, m) = rank_one_factor(&s);
            vec![Piece { gens: vec![linear_form(&m, support, q)], degree: 1, count: 1 }]
        }
        2 => {
            let dim = s.rows();
            // bring a nonzero diagonal entry into place with x_i -> x_i + x_j
            let (t, s2) = match (0..dim).find(|&i| !s[(i, i)].is_zero()) {
                Some(_) => (RatMatrix::identity(dim), s.clone()),
                None => {
                    let (i, j) = (0..dim)
                        .flat_map(|i| (0..dim).map(move |j| (i, j)))
                        .find(|&(i, j)| i != j && !s[(i, j)].is_zero())
                        .expect("nonzero quadric");
                    let mut t = RatMatrix::identity(dim);
                    t[(i, j)] = Rational::one();
                    let s2 = t.transpose().mul(&s).mul(&t);
                    (t, s2)
                }
            };
            let i = (0..dim).find(|&i| !s2[(i, i)].is_zero()).expect("diagonal entry present");
            let a = s2[(i, i)].clone();
            // L = e_i + sum_j (s_ij / a) e_j, s2 = a L Lᵀ + S'
            let l: Vec<Rational> = s2.row(i).iter().map(|x| x / &a).collect();
            let mut rest = s2.clone();
            for r in 0..dim {
                for c in 0..dim {
                    rest[(r, c)] -= &a * &l[r] * &l[c];
                }
            }
            let (c, m) = rank_one_factor(&rest);
            // q = a (L^2 - r^2 m^2), r^2 = -c / a
            let Some(r) = rational_sqrt(&(-(&c / &a))) else {
                return vec![Piece { gens: vec![q.primitive(MonomialOrder::GrevLex)], degree: 1, count: 2 }];
            };
            let tinv_t = t.inverse().expect("shear is invertible").transpose();
            [Rational::one(), -Rational::one()]
                .iter()
                .map(|sign| {
                    let v: Vec<Rational> = l.iter().zip(&m).map(|(x, y)| x - &r * y * sign).collect();
                    let v = tinv_t.mul_vec(&v);
                    Piece { gens: vec![linear_form(&v, support, q)], degree: 1, count: 1 }
                })
                .collect()
        }
        _ => vec![whole()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, vars};

    fn comps(src: &[&str], names: &[&str]) -> Vec<(String, usize, u64, u64)> {
        let v = vars(names);
        let i = Ideal::new(v.clone(), src.iter().map(|s| parse_polynomial(s, &v).unwrap()).collect());
        let mut out: Vec<_> = i
            .decompose()
            .unwrap()
            .into_iter()
            .map(|c| (c.ideal.to_string(), c.dimension, c.degree, c.geometric_count))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn product_of_coordinates() {
        let c = comps(&["x*y"], &["x", "y"]);
        assert_eq!(c, vec![("<x>".into(), 1, 1, 1), ("<y>".into(), 1, 1, 1)]);
    }

    #[test]
    fn square_has_one_component() {
        assert_eq!(comps(&["x^2"], &["x", "y"]), vec![("<x>".into(), 1, 1, 1)]);
    }

    #[test]
    fn difference_of_squares() {
        let c = comps(&["x^2 - y^2"], &["x", "y"]);
        assert_eq!(c, vec![("<x + y>".into(), 1, 1, 1), ("<x - y>".into(), 1, 1, 1)]);
    }

    #[test]
    fn irrational_pair_of_planes() {
        let c = comps(&["x^2 - 2*y^2"], &["x", "y"]);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].2, c[0].3), (1, 2));
    }

    #[test]
    fn trace_hyperplane_in_sl2_is_one_quadric() {
        let c = comps(&["a*d - b*c - 1", "a + d - 2"], &["a", "b", "c", "d"]);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].1, c[0].2, c[0].3), (2, 2, 1));
    }

    #[test]
    fn zero_dimensional_point_count() {
        let c = comps(&["x^2 + y^2 - 1", "x - y"], &["x", "y"]);
        let total: u64 = c.iter().map(|c| c.3).sum();
        assert_eq!(total, 2);
        let c = comps(&["x^3 - x", "y^2 - 2*y + 1"], &["x", "y"]);
        assert_eq!(c.iter().map(|c| c.3).sum::<u64>(), 3);
        assert!(c.iter().all(|c| c.1 == 0));
    }

    #[test]
    fn unit_ideal_has_no_components() {
        assert!(comps(&["x", "x - 1"], &["x", "y"]).is_empty());
    }

    #[test]
    fn unsupported_class_reports() {
        let v = vars(&["x", "y", "z"]);
        let i = Ideal::new(
            v.clone(),
            vec![
                parse_polynomial("x^3 + y^3 + z^3 - 1", &v).unwrap(),
                parse_polynomial("x*y*z - 2", &v).unwrap(),
            ],
        );
        assert!(matches!(i.decompose(), Err(PolyError::UnsupportedDecomposition(_))));
    }
}
