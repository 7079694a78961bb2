mod common;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{max_abs_diff, random_invertible, random_sl2, rational_rotation, small_rational};
use rigidity_core::bounds::{
    check_f_monotone, escape_bound, TowerArith, TowerInt, VarietyProfile,
};
use rigidity_core::groups::{
    affine_embed, ball, fixtures, sym_power, AffineElement, AmbientGroup, BallLimits, GroupElement,
    RepresentationSpec,
};
use rigidity_core::matrix::{rat, RatMatrix, Rational};
use rigidity_core::poly::{
    parse_polynomial, s_polynomial, vars, Ideal, MonomialOrder, Polynomial, Vars,
};
use rigidity_core::rigidity::{compare_spectra, recover_linear_conjugacy, Mode, SpectraVerdict};
use rigidity_core::spectra::{cartan, jordan, margulis_invariant, margulis_norm, Invariant, Weights};
use rigidity_core::variety::{escape_tower, escape_witness, within_escape_bound, Variety, VarietyError};

fn xyz() -> Vars {
    vars(&["x", "y", "z"])
}

fn poly_strategy(v: Vars, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    let n = v.len();
    prop::collection::vec((prop::collection::vec(0..=max_deg, n), -5i64..=5), 0..5).prop_map(move |terms| {
        Polynomial::from_terms(v.clone(), terms.into_iter().map(|(e, c)| (e, rat(c))))
    })
}

fn point_strategy(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-4i64..=4, 1i64..=3), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Rational::new(a.into(), b.into())).collect())
}

fn sl2() -> Arc<AmbientGroup> {
    Arc::new(AmbientGroup::SpecialLinear(2))
}

// bounds

/// `M(x, y, n)` straight from the recursion on machine-independent integers.
fn oracle_bound(x: u32, y: u32, n: u32) -> BigUint {
    let (mut a, mut b) = (BigUint::from(x), BigUint::from(y));
    let mut sum = a.clone();
    for _ in 0..n {
        let t: u32 = 1u32 << u32::try_from(&a).unwrap();
        let ai = u32::try_from(&a).unwrap();
        let next_a = a.pow(t) * b.pow(ai * t);
        b = b.pow(t);
        a = next_a;
        sum += &a;
    }
    sum
}

#[test]
fn escape_bound_matches_recursion_oracle() {
    for x in 1..=3u32 {
        for y in 1..=3u32 {
            for n in 0..=1u32 {
                let m = escape_bound(&VarietyProfile::exact(x.into(), y.into(), n.into()).unwrap());
                assert_eq!(m.as_biguint(), Some(&oracle_bound(x, y, n)), "M({x},{y},{n})");
            }
        }
    }
}

proptest! {
    #[test]
    fn escape_bound_increases_with_dimension(irr in 1u64..=3, mdeg in 1u64..=3, d in 0u64..2) {
        let lo = escape_bound(&VarietyProfile::exact(irr, mdeg, d).unwrap());
        let hi = escape_bound(&VarietyProfile::exact(irr, mdeg, d + 1).unwrap());
        prop_assert_eq!(lo.compare(&hi), Some(Ordering::Less));
    }

    #[test]
    fn symbolic_comparison_agrees_with_exact(
        b1 in 2u64..6, e1 in 1u64..40, c1 in 0u64..50,
        b2 in 2u64..6, e2 in 1u64..40, c2 in 0u64..50,
    ) {
        let exact = TowerArith::default();
        let symbolic = TowerArith::new(3);
        let build = |ar: &TowerArith, b: u64, e: u64, c: u64| {
            ar.add(&ar.pow(&TowerInt::from_u64(b), &TowerInt::from_u64(e)), &TowerInt::from_u64(c))
        };
        let (x, y) = (build(&exact, b1, e1, c1), build(&exact, b2, e2, c2));
        let want = x.as_biguint().unwrap().cmp(y.as_biguint().unwrap());
        let (sx, sy) = (build(&symbolic, b1, e1, c1), build(&symbolic, b2, e2, c2));
        if let Some(got) = sx.compare(&sy) {
            prop_assert_eq!(got, want);
        }
        if let Some(o) = sx.compare(&x) {
            prop_assert_eq!(o, Ordering::Equal);
        }
    }

    #[test]
    fn f_monotone_holds_under_its_precondition(
        big_a in 1u64..=2, big_b in 1u64..=2, n in 0i64..=1, fa in 0.0f64..1.0, fb in 0.0f64..1.0,
    ) {
        let t = 1u64 << big_a;
        let a_cap = big_a.pow(t as u32) * big_b.pow((big_a * t) as u32);
        let b_cap = big_b.pow(t as u32);
        let a = 1 + ((a_cap - 1) as f64 * fa) as u64;
        let b = 1 + ((b_cap - 1) as f64 * fb) as u64;
        let ok = check_f_monotone(
            &TowerInt::from_u64(a),
            &TowerInt::from_u64(b),
            &TowerInt::from_u64(big_a),
            &TowerInt::from_u64(big_b),
            n,
        );
        prop_assert_eq!(ok, Ok(true));
    }
}

// poly

proptest! {
    #[test]
    fn addition_round_trips(p in poly_strategy(xyz(), 3), q in poly_strategy(xyz(), 3)) {
        prop_assert_eq!(p.add(&q).sub(&q), p);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        p in poly_strategy(xyz(), 3),
        q in poly_strategy(xyz(), 3),
        pt in point_strategy(3),
    ) {
        let (ep, eq) = (p.evaluate(&pt).unwrap(), q.evaluate(&pt).unwrap());
        prop_assert_eq!(p.add(&q).evaluate(&pt).unwrap(), &ep + &eq);
        prop_assert_eq!(p.mul(&q).evaluate(&pt).unwrap(), ep * eq);
    }

    #[test]
    fn display_parses_back(p in poly_strategy(xyz(), 3)) {
        let text = p.to_string();
        prop_assert_eq!(parse_polynomial(&text, &xyz()).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn s_polynomials_of_reduced_bases_vanish(
        gens in prop::collection::vec(poly_strategy(vars(&["x", "y"]), 2), 1..4),
        lex in any::<bool>(),
    ) {
        let order = if lex { MonomialOrder::Lex } else { MonomialOrder::GrevLex };
        let ideal = Ideal::new(vars(&["x", "y"]), gens.clone()).with_order(order);
        let basis = ideal.basis().unwrap();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let s = s_polynomial(&basis[i], &basis[j], order);
                prop_assert!(ideal.reduce(&s).unwrap().is_zero());
            }
        }
        for g in &gens {
            prop_assert!(ideal.contains(g).unwrap());
        }
        // idempotent
        let again = ideal.groebner().unwrap();
        prop_assert_eq!(again.basis().unwrap(), basis);
    }

    #[test]
    fn redundant_generator_keeps_dimension_and_degree(
        gens in prop::collection::vec(poly_strategy(xyz(), 2), 1..3),
        mult in prop::collection::vec(poly_strategy(xyz(), 1), 3),
    ) {
        let v = xyz();
        let ideal = Ideal::new(v.clone(), gens.clone());
        let extra = gens
            .iter()
            .zip(&mult)
            .fold(Polynomial::zero(v.clone()), |acc, (g, m)| acc.add(&g.mul(m)));
        let bigger = ideal.with_generator(extra);
        // unit ideals must stay unit ideals
        prop_assert_eq!(format!("{:?}", ideal.dimension()), format!("{:?}", bigger.dimension()));
        prop_assert_eq!(format!("{:?}", ideal.degree()), format!("{:?}", bigger.degree()));
    }
}

#[test]
fn components_cover_the_same_points() {
    let v = xyz();
    let p = |s: &str| parse_polynomial(s, &v).unwrap();
    let fixtures: Vec<Vec<Polynomial>> = vec![
        vec![p("x*y")],
        vec![p("x^2 - y^2")],
        vec![p("(x - 1)*(y + z)")],
        vec![p("x^2 - 2*x"), p("y - x")],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for gens in fixtures {
        let ideal = Ideal::new(v.clone(), gens.clone());
        let comps = ideal.decompose().unwrap();
        for _ in 0..100 {
            // small coordinates so the zero set is actually hit
            let pt: Vec<Rational> = (0..3).map(|_| rat(rng.gen_range(-1i64..=2))).collect();
            let inside = ideal.vanishes_at(&pt).unwrap();
            let in_some = comps.iter().any(|c| c.ideal.vanishes_at(&pt).unwrap());
            assert_eq!(inside, in_some, "{gens:?} at {pt:?}");
        }
    }
}

// groups

fn random_rep(seed: u64) -> RepresentationSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = vec![("a".to_string(), random_sl2(&mut rng)), ("b".to_string(), random_sl2(&mut rng))];
    RepresentationSpec::new(sl2(), gens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_are_nested_exact_and_labelled(seed in any::<u64>(), r in 0usize..3) {
        let rep = random_rep(seed);
        let small = ball(&rep, r).unwrap();
        let big = ball(&rep, r + 1).unwrap();
        let ideal = AmbientGroup::SpecialLinear(2).defining_ideal();
        for (w, m) in small.sorted() {
            prop_assert!(big.contains(m));
            prop_assert!(w.len() <= r);
            prop_assert_eq!(&small.alphabet().evaluate(w), m);
            prop_assert!(ideal.vanishes_at(&AmbientGroup::SpecialLinear(2).point_of(m)).unwrap());
        }
        // every product of at most r symbols is present
        let k = small.alphabet().len();
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..r {
            let next: Vec<Vec<usize>> = words
                .iter()
                .flat_map(|w| (0..k).map(move |s| { let mut x = w.clone(); x.push(s); x }))
                .collect();
            for w in &next {
                prop_assert!(small.contains(&small.alphabet().evaluate(w)));
            }
            words = next;
        }
    }

    #[test]
    fn affine_embedding_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::sl(random_sl2(&mut rng)).unwrap();
        let x: Vec<Rational> = (0..2).map(|_| small_rational(&mut rng)).collect();
        let e = AffineElement::new(g, x).unwrap();
        prop_assert_eq!(AffineElement::from_embedded(&affine_embed(&e)).unwrap(), e);
    }

    #[test]
    fn symmetric_powers_are_multiplicative(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::sl(random_sl2(&mut rng)).unwrap();
        let h = GroupElement::sl(random_sl2(&mut rng)).unwrap();
        let lhs = sym_power(&g.mul(&h), n).unwrap();
        let rhs = sym_power(&g, n).unwrap().mul(&sym_power(&h, n).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn ball_size_does_not_depend_on_generator_order() {
    let rep = fixtures::schottky();
    let swapped = RepresentationSpec::new(
        rep.ambient.clone(),
        rep.generators.iter().rev().map(|g| (g.name.clone(), g.image.matrix().clone())).collect(),
    )
    .unwrap();
    let a: HashSet<RatMatrix> = ball(&rep, 4).unwrap().sorted().into_iter().map(|(_, m)| m.clone()).collect();
    let b: HashSet<RatMatrix> = ball(&swapped, 4).unwrap().sorted().into_iter().map(|(_, m)| m.clone()).collect();
    assert_eq!(a, b);
}

// variety

fn hyperplane(rng: &mut ChaCha8Rng) -> Variety {
    let v = sl2().variables();
    let coeffs: Vec<i64> = (0..5).map(|_| rng.gen_range(-2i64..=2)).collect();
    let mut p = Polynomial::constant(v.clone(), rat(coeffs[4]));
    for (i, c) in coeffs[..4].iter().enumerate() {
        p = p.add(&Polynomial::var(v.clone(), i).scale(&rat(*c)));
    }
    Variety::new(sl2(), vec![p]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn translation_preserves_profiles_and_inverts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = hyperplane(&mut rng);
        let g = GroupElement::sl(random_sl2(&mut rng)).unwrap();
        let t = v.translate(&g).unwrap();
        let (pv, pt) = (v.profile_of().unwrap(), t.profile_of().unwrap());
        prop_assert_eq!(pv.summary, pt.summary);
        prop_assert_eq!(pv.top_components, pt.top_components);
        prop_assert_eq!(pv.degree, pt.degree);
        prop_assert!(t.translate(&g.inverse()).unwrap().same_as(&v).unwrap());
    }

    #[test]
    fn towers_respect_growth_and_decrement(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = hyperplane(&mut rng);
        let alphabet = fixtures::schottky().alphabet().unwrap();
        match escape_tower(&v, &alphabet) {
            Ok(t) => {
                prop_assert!(t.inequalities_hold);
                prop_assert_ne!(t.bound_decrement, Some(false));
            }
            // empty or improper inputs and heuristic stalls carry no claim
            Err(VarietyError::Domain(_) | VarietyError::EscapeStalled { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn dense_groups_escape_within_the_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = hyperplane(&mut rng);
        let report = v.profile_of().unwrap();
        let Some(profile) = report.summary.profile().copied() else { return Ok(()) };
        prop_assume!(!v.full_ideal().same_ideal(&AmbientGroup::SpecialLinear(2).defining_ideal()).unwrap());
        let horizon = rigidity_core::variety::capped_horizon(&escape_bound(&profile), 6);
        for rep in [fixtures::sanov(), fixtures::schottky()] {
            let w = escape_witness(&v, &rep.alphabet().unwrap(), horizon, BallLimits::default()).unwrap();
            let w = w.expect("a dense group escapes a proper hyperplane section");
            prop_assert!(within_escape_bound(w.length, &profile).unwrap());
        }
    }
}

// spectra

fn pool() -> Vec<RatMatrix> {
    ball(&fixtures::fuchsian(3), 2)
        .unwrap()
        .sorted()
        .into_iter()
        .filter(|(w, _)| !w.is_empty())
        .map(|(_, m)| m.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jordan_is_conjugation_invariant(seed in any::<u64>(), idx in 0usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = pool()[idx].clone();
        let h = random_invertible(&mut rng, 3);
        let c = h.mul(&g).mul(&h.inverse().unwrap());
        let d = max_abs_diff(&jordan(&g).unwrap().entries, &jordan(&c).unwrap().entries);
        prop_assert!(d < 1e-8, "{}", d);
    }

    #[test]
    fn cartan_is_rotation_bi_invariant(seed in any::<u64>(), idx in 0usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = pool()[idx].clone();
        let k = rational_rotation(&mut rng, 3).mul(&g).mul(&rational_rotation(&mut rng, 3));
        let d = max_abs_diff(&cartan(&g).unwrap().entries, &cartan(&k).unwrap().entries);
        prop_assert!(d < 1e-8, "{}", d);
    }

    #[test]
    fn projections_are_sorted_and_traceless(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = rigidity_core::groups::sym_power_matrix(&random_sl2(&mut rng), 3);
        for v in [cartan(&g).unwrap().entries, jordan(&g).unwrap().entries] {
            prop_assert!(v.iter().sum::<f64>().abs() < 1e-10 * v[0].abs().max(1.0));
            prop_assert!(v.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn powers_scale_jordan(idx in 0usize..16, n in 1u32..=5) {
        let g = pool()[idx].clone();
        let base = jordan(&g).unwrap().entries;
        let p = jordan(&g.pow(n)).unwrap().entries;
        for (x, y) in p.iter().zip(&base) {
            let want = n as f64 * y;
            prop_assert!((x - want).abs() <= 1e-7 * want.abs().max(1.0));
        }
    }

    #[test]
    fn cartan_equals_jordan_for_symmetric_positive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_sl2(&mut rng);
        let s = g.transpose().mul(&g);
        let d = max_abs_diff(&cartan(&s).unwrap().entries, &jordan(&s).unwrap().entries);
        prop_assert!(d < 1e-8, "{}", d);
    }
}

#[test]
fn margulis_vector_norm_matches_norm_field() {
    let rep = fixtures::affine_so21(&[1, 1]);
    let form = fixtures::discriminant_form();
    let q = form.to_nalgebra();
    let b = ball(&rep, 2).unwrap();
    for (w, m) in b.sorted() {
        if w.is_empty() {
            continue;
        }
        let e = AffineElement::from_embedded(&GroupElement::new(rep.ambient.clone(), m.clone()).unwrap()).unwrap();
        let inv = margulis_invariant(&e, &Weights::symmetric_power(3), Some(&form)).unwrap();
        let h = nalgebra::DMatrix::from_fn(3, 3, |i, j| inv.h_columns[j][i]);
        let wv = h * nalgebra::DVector::from_vec(inv.vector.clone());
        let n = wv.dot(&(&q * &wv)).abs().sqrt();
        assert!((n - inv.norm).abs() <= 1e-8 * inv.norm.max(1.0), "{n} vs {}", inv.norm);
    }
}

/// The norm of the translation invariant stays away from zero on the
/// properly acting fixture.
#[test]
fn translation_norm_never_vanishes_on_the_proper_fixture() {
    let rep = fixtures::affine_so21(&[1, 1]);
    let form = rep.invariant_form.clone();
    let b = ball(&rep, 4).unwrap();
    let mut smallest = f64::INFINITY;
    for (w, m) in b.sorted() {
        if w.is_empty() {
            continue;
        }
        let e = AffineElement::from_embedded(&GroupElement::new(rep.ambient.clone(), m.clone()).unwrap()).unwrap();
        smallest = smallest.min(margulis_norm(&e, form.as_ref()).unwrap());
    }
    assert!(smallest > 1e-6, "smallest norm {smallest}");
}

// rigidity

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn recovered_certificates_verify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = fixtures::schottky();
        let c0 = random_invertible(&mut rng, 2);
        let conj = rep.conjugated_by(&c0).unwrap();
        let exact = recover_linear_conjugacy(&rep, &conj, Mode::Exact, 1e-9).unwrap().expect("conjugate pair");
        prop_assert_eq!(exact.verify(&rep, &conj).unwrap(), 0.0);
        let numeric = recover_linear_conjugacy(&rep, &conj, Mode::Numeric, 1e-9).unwrap().expect("conjugate pair");
        prop_assert!(numeric.verify(&rep, &conj).unwrap() < 1e-9);
    }

    #[test]
    fn comparison_is_symmetric_and_monotone(seed in any::<u64>(), index in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = fixtures::schottky();
        let other = fixtures::perturbed(&base, index).conjugated_by(&random_invertible(&mut rng, 2)).unwrap();
        let lim = BallLimits::default();
        let mut first: Option<usize> = None;
        for r in 1..=3 {
            let ab = compare_spectra(&base, &other, Invariant::Jordan, r, 1e-9, lim).unwrap();
            let ba = compare_spectra(&other, &base, Invariant::Jordan, r, 1e-9, lim).unwrap();
            prop_assert_eq!(ab.verdict, ba.verdict);
            prop_assert_eq!(
                ab.separating_word.as_ref().map(|w| &w.word),
                ba.separating_word.as_ref().map(|w| &w.word)
            );
            match (first, ab.verdict) {
                (None, SpectraVerdict::Separated) => first = Some(ab.separating_word.unwrap().length),
                (Some(len), v) => {
                    prop_assert_eq!(v, SpectraVerdict::Separated);
                    prop_assert!(ab.separating_word.unwrap().length <= len);
                }
                _ => {}
            }
        }
        prop_assert!(first.is_some());
    }
}

#[test]
fn counterexample_jordan_spectra_agree_at_every_radius() {
    let (u, z) = (fixtures::affine_so21(&[1, 1]), fixtures::affine_so21_untranslated());
    for r in 0..=4 {
        let c = compare_spectra(&u, &z, Invariant::Jordan, r, 1e-9, BallLimits::default()).unwrap();
        assert_eq!(c.verdict, SpectraVerdict::SpectraEqual, "radius {r}");
    }
}
