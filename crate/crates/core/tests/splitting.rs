mod common;

use common::{arb_rational, arb_symmetric};
use degha_core::rational::rat;
use degha_core::quadratic::{compute_sigma0, projectors_of, split_momentum, split_velocity};
use degha_core::{Polynomial, QuadraticLagrangian, RatMatrix, Rational, VariableTable};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sigma_identities(a in arb_symmetric(6)) {
        let s = compute_sigma0(&a).unwrap();
        let s0 = &s.sigma0;
        prop_assert_eq!(&(&a * s0) * &a, a.clone());
        prop_assert_eq!(&(s0 * &a) * s0, s0.clone());
        prop_assert_eq!(&a * s0, s0 * &a);
        prop_assert_eq!(s.rank, a.rank());
    }

    // The four Penrose conditions single out the pseudoinverse.
    #[test]
    fn sigma0_is_the_pseudoinverse(a in arb_symmetric(5)) {
        let s0 = compute_sigma0(&a).unwrap().sigma0;
        let as0 = &a * &s0;
        let s0a = &s0 * &a;
        prop_assert_eq!(as0.transpose(), as0);
        prop_assert_eq!(s0a.transpose(), s0a);
        prop_assert_eq!(s0.transpose(), s0);
    }

    #[test]
    fn projector_identities(a in arb_symmetric(6)) {
        let pr = projectors_of(&compute_sigma0(&a).unwrap());
        prop_assert_eq!(&pr.p * &pr.p, pr.p.clone());
        prop_assert_eq!(&pr.r * &pr.r, pr.r.clone());
        prop_assert!((&pr.p * &pr.r).is_zero());
        prop_assert!((&pr.r * &a).is_zero());
        prop_assert_eq!(pr.r.rank() + a.rank(), a.rows());
    }

    #[test]
    fn velocity_split_recombines(a in arb_symmetric(4), seed in prop::collection::vec(arb_rational(), 4)) {
        let n = a.rows();
        let table = VariableTable::phase_space(n);
        let l = QuadraticLagrangian::mechanics(a.clone(), vec![Polynomial::zero(&table); n], Polynomial::zero(&table)).unwrap();
        let s = compute_sigma0(&a).unwrap();
        let ydot: Vec<Rational> = seed[..n].to_vec();
        let q = vec![Rational::from_integer(0.into()); n];
        let split = split_velocity(&l, &s, &Rational::from_integer(0.into()), &q, &ydot).unwrap();
        for (i, y) in ydot.iter().enumerate() {
            prop_assert_eq!(&split.s[i] + &split.f[i], y.clone());
        }
        // a·S = 0: the S part lies in the kernel.
        prop_assert!(a.mul_vec(&split.s).unwrap().iter().all(|x| *x == Rational::from_integer(0.into())));
        let pr = projectors_of(&s);
        let m = split_momentum(&pr, &ydot).unwrap();
        for (i, y) in ydot.iter().enumerate() {
            prop_assert_eq!(&m.rp[i] + &m.pp[i], y.clone());
        }
    }
}

#[test]
fn diagonal_example() {
    let a = RatMatrix::from_i64(&[&[2, 0, 0], &[0, 0, 0], &[0, 0, -4]]);
    let s = compute_sigma0(&a).unwrap();
    let want = RatMatrix::diag(&[rat(1, 2), rat(0, 1), rat(-1, 4)]);
    assert_eq!(s.sigma0, want);
}
