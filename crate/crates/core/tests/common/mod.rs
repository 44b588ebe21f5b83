#![allow(dead_code)]

use std::sync::Arc;

use degha_core::poly::monomials_up_to;
use degha_core::rational::rat;
use degha_core::{Polynomial, RatMatrix, Rational, VariableTable};
use proptest::prelude::*;

pub fn arb_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// Sparse polynomial of total degree at most `degree` with up to `terms` terms.
pub fn arb_poly(table: Arc<VariableTable>, degree: u32, terms: usize) -> impl Strategy<Value = Polynomial> {
    let monos = monomials_up_to(table.len(), degree);
    let n = monos.len();
    prop::collection::vec((0..n, arb_rational()), 0..=terms).prop_map(move |picks| {
        Polynomial::from_terms(&table, picks.into_iter().map(|(i, c)| (monos[i].clone(), c)))
    })
}

/// Symmetric `n×n` matrix `B·D·Bᵀ` with `B` of width `k ≤ n`, so every rank occurs.
pub fn arb_symmetric(max_n: usize) -> impl Strategy<Value = RatMatrix> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, k)| {
            (
                Just((n, k)),
                prop::collection::vec(-3i64..=3, n * k),
                prop::collection::vec(prop_oneof![Just(rat(1, 2)), Just(rat(-1, 1)), Just(rat(2, 3))], k),
            )
        })
        .prop_map(|((n, k), b, d)| symmetric_from(n, k, &b, &d))
}

pub fn symmetric_from(n: usize, k: usize, b: &[i64], d: &[Rational]) -> RatMatrix {
    let mut rows = vec![vec![Rational::from_integer(0.into()); n]; n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..k {
                rows[i][j] += Rational::from_integer((b[i * k + l] * b[j * k + l]).into()) * &d[l];
            }
        }
    }
    RatMatrix::from_rows(rows).unwrap()
}

pub fn p(text: &str, table: &Arc<VariableTable>) -> Polynomial {
    degha_core::parse_polynomial(text, table).unwrap()
}

/// A degenerate model `ℒ = ½ q̇ a q̇ + c` with `b = 0` and quadratic `c`
/// whose only constraints besides `R·p = 0` are `R·N·R·q = 0`, together with
/// exact initial data on that surface.
#[derive(Clone, Debug)]
pub struct DegenerateModel {
    pub a: RatMatrix,
    pub c: Polynomial,
    pub q0: Vec<Rational>,
    pub p0: Vec<Rational>,
}

pub fn arb_degenerate_model(max_n: usize) -> impl Strategy<Value = DegenerateModel> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), 0..n))
        .prop_flat_map(|(n, k)| {
            (
                Just((n, k)),
                prop::collection::vec(-2i64..=2, n * k),
                prop::collection::vec(prop_oneof![Just(rat(1, 1)), Just(rat(1, 2)), Just(rat(-1, 1))], k),
                prop::collection::vec(-2i64..=2, n * n),
                prop::collection::vec(-2i64..=2, n * n),
                prop::collection::vec(-2i64..=2, 4 * n),
            )
        })
        .prop_map(|((n, k), b, d, mm, nn, vecs)| {
            let a = symmetric_from(n, k, &b, &d);
            let s0 = degha_core::quadratic::compute_sigma0(&a).unwrap();
            let pr = degha_core::quadratic::projectors_of(&s0);
            let sym = |raw: &[i64]| {
                let rows: Vec<Vec<Rational>> = (0..n)
                    .map(|i| (0..n).map(|j| rat(raw[i * n + j] + raw[j * n + i], 4)).collect())
                    .collect();
                RatMatrix::from_rows(rows).unwrap()
            };
            let k_mat = &(&(&a * &sym(&mm)) * &a) + &(&(&pr.r * &sym(&nn)) * &pr.r);
            let ints = |off: usize| -> Vec<Rational> { (0..n).map(|i| rat(vecs[off + i], 1)).collect() };
            let l1 = a.mul_vec(&ints(0)).unwrap();
            let l2 = a.mul_vec(&ints(n)).unwrap();
            let table = VariableTable::phase_space(n);
            let q: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(&table, table.position(i).unwrap())).collect();
            let t = Polynomial::var(&table, 0);
            let mut c = Polynomial::zero(&table);
            for i in 0..n {
                for j in 0..n {
                    c = &c - &(&q[i] * &q[j]).scale(&(&k_mat[(i, j)] * rat(1, 2)));
                }
                c = &c + &q[i].scale(&l1[i]);
                c = &c + &(&t * &q[i]).scale(&l2[i]);
            }
            let q0 = pr.p.mul_vec(&ints(2 * n)).unwrap();
            let p0 = pr.p.mul_vec(&ints(3 * n)).unwrap();
            DegenerateModel { a, c, q0, p0 }
        })
}
