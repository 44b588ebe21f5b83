//! BRST charge `Q = i Σ_r Σ_i c̄^i_(r) δ(c_i^(r))` and the graded bracket on
//! the vertical table extended by ghost/antighost pairs.
//!
//! The bracket pairs `(q, pd)`, `(qd, p)` on the base and, in the fibre,
//! `c_i^(r)` with `c̄^i_(r)` and `c^i_(r)` with `c̄_i^(r)`, normalised so that
//! `{c̄^i_(r), c_i^(r)}_S = −i`.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::koszul::{AntighostTower, KtDifferential};
use crate::matrix::RatMatrix;
use crate::poly::graded::{GeneratorKind, GeneratorUniverse, GradedElement, Generator};
use crate::poly::{Poly, VarRole, VariableTable};
use crate::quadratic::Projectors;
use crate::rational::{imaginary_unit, GaussianRational, Rational};

pub type GaussElement = GradedElement<GaussianRational>;

#[derive(Clone, Debug)]
pub struct BrstCharge {
    pub q: GaussElement,
    pub r_max: u32,
}

fn gauss(c: &Rational) -> GaussianRational {
    GaussianRational::new(c.clone(), Rational::zero())
}

/// Builds `Q` over the vertical table and the tower's universe.
pub fn brst_charge(tower: &AntighostTower, pr: &Projectors) -> Result<BrstCharge> {
    if !tower.with_ghosts() {
        return Err(Error::InvalidConfig("BRST charge needs a tower with ghosts".into()));
    }
    brst_charge_over(tower, tower.universe(), pr)
}

/// `Q` over an arbitrary universe containing the tower's antighosts and ghosts.
pub fn brst_charge_over(
    tower: &AntighostTower,
    universe: &Arc<GeneratorUniverse>,
    pr: &Projectors,
) -> Result<BrstCharge> {
    if tower.n() != 1 {
        return Err(Error::Unsupported("BRST charge needs n = 1".into()));
    }
    let vv = VariableTable::vertical(tower.m());
    let delta = KtDifferential::over(tower.base(), &tower.antighost_universe(), pr)?;
    let mut q = GaussElement::zero(&vv, universe);
    for (k, g) in delta.universe().generators().iter().enumerate() {
        let dc = delta
            .image(k)
            .embed_base(&vv)?
            .embed_universe(universe)?
            .to_gaussian();
        let ghost = Generator::new(GeneratorKind::Ghost, g.index, g.r);
        let cbar = GaussElement::from_generator(&vv, universe, ghost)?;
        q = q.try_add(&cbar.try_mul(&dc)?)?;
    }
    Ok(BrstCharge {
        q: q.scale(&imaginary_unit()),
        r_max: tower.r_max(),
    })
}

fn base_part<C: crate::rational::Coefficient>(f: &GradedElement<C>, g: &GradedElement<C>) -> Result<GradedElement<C>> {
    let vv = f.base();
    let m = vv.positions();
    if vv.len() != 1 + 4 * m || vv.momenta() != m {
        return Err(Error::Unsupported("graded bracket needs the vertical table".into()));
    }
    let mut out = GradedElement::zero(vv, f.universe());
    for i in 0..m {
        let q = vv.position(i).expect("q");
        let p = vv.momentum(i).expect("p");
        let qd = vv.position_vertical(i).expect("qd");
        let pd = vv.momentum_vertical(i).expect("pd");
        let pairs = [(pd, q), (p, qd)];
        for (a, b) in pairs {
            out = out
                .try_add(&f.partial_base(a).try_mul(&g.partial_base(b))?)?
                .try_sub(&f.partial_base(b).try_mul(&g.partial_base(a))?)?;
        }
    }
    Ok(out)
}

/// The graded bracket `{f, g}_S`.
pub fn graded_bracket_s(f: &GaussElement, g: &GaussElement) -> Result<GaussElement> {
    if *f.base() != *g.base() || *f.universe() != *g.universe() {
        return Err(Error::TableMismatch);
    }
    let u = f.universe();
    let mut fibre = GaussElement::zero(f.base(), u);
    let (even, odd) = f.parity_parts();
    for (part, pf) in [(even, 0u32), (odd, 1u32)] {
        if part.is_zero() {
            continue;
        }
        for (k, gen) in u.generators().iter().enumerate() {
            let (partner_kind, first) = match gen.kind {
                GeneratorKind::Antighost => (GeneratorKind::Ghost, true),
                GeneratorKind::AntighostConj => (GeneratorKind::GhostConj, false),
                _ => continue,
            };
            let Some(j) = u.index_of(Generator::new(partner_kind, gen.index, gen.r)) else {
                continue;
            };
            let r = gen.r;
            let sign_r = if r % 2 == 0 { 1 } else { -1 };
            let df_c = part.partial_generator(k);
            let df_cbar = part.partial_generator(j);
            let dg_c = g.partial_generator(k);
            let dg_cbar = g.partial_generator(j);
            let mut term = GaussElement::zero(f.base(), u);
            if first {
                // (−1)^r ∂f/∂c̄ ∂g/∂c − ∂f/∂c ∂g/∂c̄
                term = term.try_add(&df_cbar.try_mul(&dg_c)?.scale(&gauss(&Rational::from_integer(sign_r.into()))))?;
                term = term.try_sub(&df_c.try_mul(&dg_cbar)?)?;
            } else {
                // ∂f/∂c̄ ∂g/∂c − (−1)^r ∂f/∂c ∂g/∂c̄
                term = term.try_add(&df_cbar.try_mul(&dg_c)?)?;
                term = term.try_sub(&df_c.try_mul(&dg_cbar)?.scale(&gauss(&Rational::from_integer(sign_r.into()))))?;
            }
            if (r * pf) % 2 == 1 {
                term = term.neg();
            }
            fibre = fibre.try_add(&term)?;
        }
    }
    let minus_i = -imaginary_unit();
    base_part(f, g)?.try_add(&fibre.scale(&minus_i))
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketCheck {
    pub name: String,
    pub expected: String,
    pub found: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BrstReport {
    pub passed: bool,
    pub convention: String,
    pub r_max: u32,
    pub checks: Vec<BracketCheck>,
}

fn record(checks: &mut Vec<BracketCheck>, name: String, expected: &GaussElement, found: &GaussElement) {
    checks.push(BracketCheck {
        name,
        expected: expected.to_string(),
        found: found.to_string(),
        passed: expected == found,
    });
}

fn matrix_entry(m: &RatMatrix, i: usize, j: usize) -> GaussianRational {
    gauss(&m[(i, j)])
}

/// Compares `{Q, ·}_S` with `δ` on antighosts, with zero on base
/// coordinates and with the expected shift on ghosts.
pub fn verify_brst_generates_delta(
    charge: &BrstCharge,
    tower: &AntighostTower,
    pr: &Projectors,
) -> Result<BrstReport> {
    let q = &charge.q;
    let vv = Arc::clone(q.base());
    let u = Arc::clone(q.universe());
    let delta = KtDifferential::over(tower.base(), &tower.antighost_universe(), pr)?;
    let zero = GaussElement::zero(&vv, &u);
    let mut checks = Vec::new();
    let r_max = charge.r_max;

    for (k, g) in delta.universe().generators().iter().enumerate() {
        if g.r >= r_max {
            continue;
        }
        let c = GaussElement::from_generator(&vv, &u, *g)?;
        let expected = delta.image(k).embed_base(&vv)?.embed_universe(&u)?.to_gaussian();
        let found = graded_bracket_s(q, &c)?;
        record(&mut checks, format!("{{Q, {}}}", g.name()), &expected, &found);
        if g.r + 1 < r_max {
            let twice = graded_bracket_s(q, &found)?;
            record(&mut checks, format!("{{Q, {{Q, {}}}}}", g.name()), &zero, &twice);
        }
    }

    for idx in 0..vv.len() {
        if matches!(vv.role(idx), VarRole::PositionVertical(_) | VarRole::MomentumVertical(_)) {
            continue;
        }
        let name = vv.name(idx);
        let x = GaussElement::from_poly(&u, Poly::var(&vv, idx));
        record(&mut checks, format!("{{Q, {name}}}"), &zero, &graded_bracket_s(q, &x)?);
    }

    let dim = tower.dim();
    for s in 1..r_max {
        let mat = if s % 2 == 1 { &pr.p } else { &pr.r };
        let sign = if (s + 1) % 2 == 0 {
            GaussianRational::one()
        } else {
            -GaussianRational::one()
        };
        for i in 0..dim {
            let cbar = GaussElement::from_generator(&vv, &u, Generator::new(GeneratorKind::Ghost, i, s))?;
            let mut expected = zero.clone();
            for j in 0..dim {
                let coeff = matrix_entry(mat, j, i);
                if coeff.is_zero() {
                    continue;
                }
                let up = GaussElement::from_generator(&vv, &u, Generator::new(GeneratorKind::Ghost, j, s + 1))?;
                expected = expected.try_add(&up.scale(&(&coeff * &sign)))?;
            }
            let found = graded_bracket_s(q, &cbar)?;
            record(&mut checks, format!("{{Q, {}}}", cbar), &expected, &found);
        }
    }

    record(&mut checks, "{Q, Q}".into(), &zero, &graded_bracket_s(q, q)?);

    Ok(BrstReport {
        passed: checks.iter().all(|c| c.passed),
        convention: "{cbar^i_(r), c_i^(r)}_S = -i".into(),
        r_max,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::build_tower;
    use crate::quadratic::{compute_sigma0, projectors_of};

    fn setup(a: &[&[i64]], r_max: u32) -> (AntighostTower, Projectors) {
        let t = build_tower(a.len(), 1, r_max, true).unwrap();
        let pr = projectors_of(&compute_sigma0(&RatMatrix::from_i64(a)).unwrap());
        (t, pr)
    }

    #[test]
    fn charge_generates_delta() {
        for a in [&[&[1i64, 0][..], &[0, 0]][..], &[&[1, 1], &[1, 1]], &[&[0, 0], &[0, 0]]] {
            let (t, pr) = setup(a, 3);
            let q = brst_charge(&t, &pr).unwrap();
            let rep = verify_brst_generates_delta(&q, &t, &pr).unwrap();
            assert!(rep.passed, "{:#?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        }
    }

    #[test]
    fn charge_text() {
        let (t, pr) = setup(&[&[1, 0], &[0, 0]], 2);
        let q = brst_charge(&t, &pr).unwrap();
        let s = q.q.to_string();
        assert!(s.contains("p2"), "{s}");
        assert!(s.contains("c1_1"), "{s}");
    }

    #[test]
    fn pairing_convention() {
        let (t, _) = setup(&[&[1, 0], &[0, 0]], 2);
        let vv = VariableTable::vertical(2);
        let u = t.universe();
        for r in 1..=2 {
            let c = GaussElement::from_generator(&vv, u, Generator::new(GeneratorKind::Antighost, 0, r)).unwrap();
            let cbar = GaussElement::from_generator(&vv, u, Generator::new(GeneratorKind::Ghost, 0, r)).unwrap();
            let b = graded_bracket_s(&cbar, &c).unwrap();
            assert_eq!(b, GaussElement::one(&vv, u).scale(&-imaginary_unit()));
        }
    }

    #[test]
    fn needs_ghosts() {
        let t = build_tower(2, 1, 2, false).unwrap();
        let pr = projectors_of(&compute_sigma0(&RatMatrix::identity(2)).unwrap());
        assert!(brst_charge(&t, &pr).is_err());
    }
}
