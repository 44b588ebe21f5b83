mod common;

use std::sync::Arc;
use std::time::Instant;

use common::{arb_poly, p};
use degha_core::constraints::{
    classify, dirac_algorithm, evolution, poisson, BracketKind, ConstraintClass, DiracStatus,
};
use degha_core::hamiltonian::HamiltonianData;
use degha_core::{Polynomial, VariableTable};
use proptest::prelude::*;

fn table_for(kind: BracketKind) -> Arc<VariableTable> {
    match kind {
        BracketKind::V => VariableTable::phase_space(2),
        BracketKind::T => VariableTable::extended(2),
        BracketKind::VV => VariableTable::vertical(2),
    }
}

fn triple(kind: BracketKind) -> impl Strategy<Value = (Polynomial, Polynomial, Polynomial)> {
    let t = table_for(kind);
    (arb_poly(t.clone(), 3, 4), arb_poly(t.clone(), 3, 4), arb_poly(t, 3, 4))
}

fn check_axioms(kind: BracketKind, f: &Polynomial, g: &Polynomial, h: &Polynomial) -> Result<(), TestCaseError> {
    let br = |a: &Polynomial, b: &Polynomial| poisson(kind, a, b).unwrap();
    prop_assert_eq!(br(f, g), -&br(g, f));
    let jacobi = &(&br(f, &br(g, h)) + &br(g, &br(h, f))) + &br(h, &br(f, g));
    prop_assert!(jacobi.is_zero(), "Jacobi fails: {}", jacobi);
    prop_assert_eq!(br(f, &(g * h)), &(&br(f, g) * h) + &(g * &br(f, h)));
    Ok(())
}

/// `∂_t f + Σ ∂ℋ/∂p ∂f/∂q − ∂ℋ/∂q ∂f/∂p`, written out directly.
fn evolution_oracle(h: &Polynomial, f: &Polynomial) -> Polynomial {
    let t = h.table();
    let mut out = f.partial_named("t").unwrap();
    for i in 1..=t.positions() {
        let (q, pn) = (format!("q{i}"), format!("p{i}"));
        out = &out + &(&h.partial_named(&pn).unwrap() * &f.partial_named(&q).unwrap());
        out = &out - &(&h.partial_named(&q).unwrap() * &f.partial_named(&pn).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn v_bracket_axioms((f, g, h) in triple(BracketKind::V)) {
        check_axioms(BracketKind::V, &f, &g, &h)?;
    }

    #[test]
    fn t_bracket_axioms((f, g, h) in triple(BracketKind::T)) {
        check_axioms(BracketKind::T, &f, &g, &h)?;
    }

    #[test]
    fn vv_bracket_axioms((f, g, h) in triple(BracketKind::VV)) {
        check_axioms(BracketKind::VV, &f, &g, &h)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn evolution_identity(
        h in arb_poly(VariableTable::phase_space(2), 3, 5),
        f in arb_poly(VariableTable::phase_space(2), 3, 5),
    ) {
        let got = evolution(&HamiltonianData::from_polynomial(h.clone()), &f).unwrap();
        prop_assert_eq!(got, evolution_oracle(&h, &f));
    }
}

#[test]
fn canonical_pairs() {
    let t = VariableTable::phase_space(2);
    assert_eq!(poisson(BracketKind::V, &p("p1", &t), &p("q1", &t)).unwrap(), p("1", &t));
    assert!(poisson(BracketKind::V, &p("p1", &t), &p("q2", &t)).unwrap().is_zero());
    let e = VariableTable::extended(2);
    assert_eq!(poisson(BracketKind::T, &p("pt", &e), &p("t", &e)).unwrap(), p("1", &e));
    let vv = VariableTable::vertical(2);
    assert_eq!(poisson(BracketKind::VV, &p("pd1", &vv), &p("q1", &vv)).unwrap(), p("1", &vv));
    assert_eq!(poisson(BracketKind::VV, &p("p1", &vv), &p("qd1", &vv)).unwrap(), p("1", &vv));
    assert!(poisson(BracketKind::V, &p("pt", &e), &p("t", &e)).unwrap().is_zero());
    assert!(poisson(BracketKind::T, &p("p1", &t), &p("q1", &t)).is_err());
}

#[test]
fn dirac_chain() {
    let t = VariableTable::phase_space(2);
    let h = HamiltonianData::from_polynomial(p("1/2*p1^2 + q1*q2", &t));
    let start = Instant::now();
    let rep = dirac_algorithm(&h, &[p("p2", &t)], 3, None).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(rep.status, DiracStatus::Closed);
    let want: Vec<Vec<Polynomial>> = ["p2", "q1", "p1", "q2"].iter().map(|s| vec![p(s, &t)]).collect();
    assert_eq!(rep.generations, want);
    assert!(rep.closure_verified);

    let osc = HamiltonianData::from_polynomial(p("1/2*p1^2 + 1/2*q1^2", &t));
    let rep = dirac_algorithm(&osc, &[p("p2", &t)], 3, None).unwrap();
    assert_eq!(rep.status, DiracStatus::Closed);
    assert_eq!(rep.generations, vec![vec![p("p2", &t)]]);
}

#[test]
fn classification() {
    let t = VariableTable::phase_space(2);
    let rep = classify(&[p("p2", &t)], 2).unwrap();
    assert_eq!(rep.classes, [ConstraintClass::First]);
    let rep = classify(&[p("q1", &t), p("p1", &t)], 2).unwrap();
    assert_eq!(rep.classes, [ConstraintClass::Second, ConstraintClass::Second]);
    assert!(!rep.coisotropic);
}
