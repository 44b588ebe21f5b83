mod common;

use std::sync::Arc;

use common::arb_rational;
use degha_core::brst::{graded_bracket_s, GaussElement};
use degha_core::koszul::build_tower;
use degha_core::poly::monomials_up_to;
use degha_core::rational::GaussianRational;
use degha_core::{GeneratorUniverse, GradedElement, GradedMonomial, Poly, Rational, VariableTable};
use proptest::prelude::*;

struct Setting {
    base: Arc<VariableTable>,
    universe: Arc<GeneratorUniverse>,
}

fn setting() -> Setting {
    let tower = build_tower(1, 1, 2, true).unwrap();
    Setting {
        base: VariableTable::vertical(1),
        universe: tower.full_universe(),
    }
}

fn arb_coefficient() -> impl Strategy<Value = GaussianRational> {
    (arb_rational(), arb_rational()).prop_map(|(re, im)| GaussianRational::new(re, im))
}

/// Random element of the given parity: at most `terms` terms, generator
/// degree at most 2 and base degree at most 1.
fn arb_homogeneous(odd: bool, terms: usize) -> impl Strategy<Value = GaussElement> {
    let s = setting();
    let u = s.universe.clone();
    let mut gmonos: Vec<Vec<u32>> = Vec::new();
    let n = u.len();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        gmonos.push(e);
        for j in i..n {
            if i == j && u.is_odd(i) {
                continue;
            }
            let mut e = vec![0; n];
            e[i] += 1;
            e[j] += 1;
            gmonos.push(e);
        }
    }
    gmonos.push(vec![0; n]);
    let gmonos: Vec<Vec<u32>> = gmonos
        .into_iter()
        .filter(|e| GradedMonomial(e.clone()).parity(&u) == odd)
        .collect();
    let bmonos = monomials_up_to(s.base.len(), 1);
    let (gl, bl) = (gmonos.len(), bmonos.len());
    prop::collection::vec((0..gl, 0..bl, arb_coefficient()), 1..=terms).prop_map(move |picks| {
        let mut out = GaussElement::zero(&s.base, &s.universe);
        for (g, b, c) in picks {
            let coeff = Poly::monomial(&s.base, bmonos[b].clone(), c);
            let term = GradedElement::from_term(&s.base, &s.universe, GradedMonomial(gmonos[g].clone()), coeff);
            out = out.try_add(&term).unwrap();
        }
        out
    })
}

fn arb_pair() -> impl Strategy<Value = ((bool, GaussElement), (bool, GaussElement))> {
    let one = any::<bool>().prop_flat_map(|o| (Just(o), arb_homogeneous(o, 3)));
    (one.clone(), one)
}

fn sign(a: bool, b: bool) -> GaussianRational {
    let v = if a && b { -1 } else { 1 };
    GaussianRational::new(Rational::from_integer(v.into()), Rational::from_integer(0.into()))
}

fn mul(f: &GaussElement, g: &GaussElement) -> GaussElement {
    f.try_mul(g).unwrap()
}

fn br(f: &GaussElement, g: &GaussElement) -> GaussElement {
    graded_bracket_s(f, g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn graded_commutativity(((a, f), (b, g)) in arb_pair()) {
        prop_assert_eq!(mul(&f, &g), mul(&g, &f).scale(&sign(a, b)));
    }

    #[test]
    fn associativity(((_, f), (_, g)) in arb_pair(), h in arb_homogeneous(true, 2)) {
        prop_assert_eq!(mul(&mul(&f, &g), &h), mul(&f, &mul(&g, &h)));
    }

    #[test]
    fn left_derivative_leibniz(((a, f), (_, g)) in arb_pair(), k in 0usize..8) {
        let u = f.universe().clone();
        let lhs = mul(&f, &g).partial_generator(k);
        let rhs = mul(&f.partial_generator(k), &g)
            .try_add(&mul(&f, &g.partial_generator(k)).scale(&sign(u.is_odd(k), a)))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn s_bracket_antisymmetry(((a, f), (b, g)) in arb_pair()) {
        let lhs = br(&f, &g);
        let rhs = br(&g, &f).scale(&sign(a, b)).neg();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn s_bracket_jacobi(((a, f), (b, g)) in arb_pair(), (c, h) in any::<bool>().prop_flat_map(|o| (Just(o), arb_homogeneous(o, 2)))) {
        let _ = c;
        let lhs = br(&f, &br(&g, &h));
        let rhs = br(&br(&f, &g), &h).try_add(&br(&g, &br(&f, &h)).scale(&sign(a, b))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn s_bracket_leibniz(((a, f), (b, g)) in arb_pair(), h in arb_homogeneous(false, 2)) {
        let lhs = br(&f, &mul(&g, &h));
        let rhs = mul(&br(&f, &g), &h).try_add(&mul(&g, &br(&f, &h)).scale(&sign(a, b))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
