//! Antighost tower and Koszul–Tate differential for the constraints `R·p = 0`.
//!
//! `δ(c^(1)) = R·p`, `δ(c^(2l)) = P·c^(2l−1)`, `δ(c^(2l+1)) = R·c^(2l)`,
//! and `δ` vanishes on base variables. Homology is computed exactly on
//! monomial bases graded by antighost number and total degree, where every
//! generator and every base variable has degree 1.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{Echelon, SparseVec};
use crate::matrix::RatMatrix;
use crate::poly::graded::{
    GeneratorKind, GeneratorUniverse, GradedDerivation, GradedElement, GradedMonomial, Generator,
};
use crate::poly::{monomials_of_degree, monomials_up_to, Monomial, Polynomial, VariableTable};
use crate::quadratic::{momentum_vector, Projectors};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct AntighostTower {
    n: usize,
    m: usize,
    r_max: u32,
    with_ghosts: bool,
    base: Arc<VariableTable>,
    universe: Arc<GeneratorUniverse>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorInfo {
    pub name: String,
    pub r: u32,
    pub odd: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerSummary {
    pub n: usize,
    pub m: usize,
    pub r_max: u32,
    pub generators: Vec<GeneratorInfo>,
    /// Conjugate ghost/antighost pairs.
    pub pairing: Vec<(String, String)>,
    /// Antighosts `c_i^(r)` transform like the momenta `p_i`.
    pub transformation: String,
}

/// Generators `c_α^(r)` for `α < n·m`, `1 ≤ r ≤ R_max`, plus ghosts `c̄^α_(r)` on request.
pub fn build_tower(m: usize, n: usize, r_max: u32, with_ghosts: bool) -> Result<AntighostTower> {
    if r_max == 0 {
        return Err(Error::InvalidConfig("R_max must be at least 1".into()));
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidConfig("n and m must be positive".into()));
    }
    let dim = n * m;
    let mut gens = Vec::new();
    for r in 1..=r_max {
        for i in 0..dim {
            gens.push(Generator::new(GeneratorKind::Antighost, i, r));
            if with_ghosts {
                gens.push(Generator::new(GeneratorKind::Ghost, i, r));
            }
        }
    }
    let base = if n == 1 {
        VariableTable::phase_space(m)
    } else {
        VariableTable::composite(n, m)
    };
    Ok(AntighostTower {
        n,
        m,
        r_max,
        with_ghosts,
        base,
        universe: GeneratorUniverse::new(gens),
    })
}

impl AntighostTower {
    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.m
    }

    pub fn with_ghosts(&self) -> bool {
        self.with_ghosts
    }

    pub fn base(&self) -> &Arc<VariableTable> {
        &self.base
    }

    pub fn universe(&self) -> &Arc<GeneratorUniverse> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    /// The antighost-only universe.
    pub fn antighost_universe(&self) -> Arc<GeneratorUniverse> {
        GeneratorUniverse::new(
            self.universe
                .generators()
                .iter()
                .filter(|g| g.kind == GeneratorKind::Antighost)
                .copied()
                .collect(),
        )
    }

    /// All four generator families, for brackets that pair `c^i` with `c̄_i` as well.
    pub fn full_universe(&self) -> Arc<GeneratorUniverse> {
        use GeneratorKind::*;
        let mut gens = Vec::new();
        for r in 1..=self.r_max {
            for i in 0..self.dim() {
                for kind in [Antighost, Ghost, AntighostConj, GhostConj] {
                    gens.push(Generator::new(kind, i, r));
                }
            }
        }
        GeneratorUniverse::new(gens)
    }

    pub fn summary(&self) -> TowerSummary {
        let pairing = if self.with_ghosts {
            self.universe
                .generators()
                .iter()
                .filter(|g| g.kind == GeneratorKind::Ghost)
                .map(|g| {
                    let partner = Generator::new(GeneratorKind::Antighost, g.index, g.r);
                    (g.name(), partner.name())
                })
                .collect()
        } else {
            vec![]
        };
        TowerSummary {
            n: self.n,
            m: self.m,
            r_max: self.r_max,
            generators: self
                .universe
                .generators()
                .iter()
                .map(|g| GeneratorInfo {
                    name: g.name(),
                    r: g.r,
                    odd: g.is_odd(),
                })
                .collect(),
            pairing,
            transformation: "antighosts transform like p".into(),
        }
    }
}

/// `δ` as an odd derivation over a given universe and base table.
#[derive(Clone, Debug)]
pub struct KtDifferential {
    base: Arc<VariableTable>,
    universe: Arc<GeneratorUniverse>,
    derivation: GradedDerivation,
    images: Vec<GradedElement>,
}

impl KtDifferential {
    pub fn new(tower: &AntighostTower, pr: &Projectors) -> Result<Self> {
        Self::over(tower.base(), tower.universe(), pr)
    }

    /// Builds `δ` on `universe`; every generator whose image needs a missing
    /// lower generator is rejected.
    pub fn over(base: &Arc<VariableTable>, universe: &Arc<GeneratorUniverse>, pr: &Projectors) -> Result<Self> {
        let dim = pr.dim();
        if base.momenta() != dim {
            return Err(Error::DimensionMismatch {
                what: "projectors",
                expected: base.momenta(),
                found: dim,
            });
        }
        let p = momentum_vector(base);
        let zero = GradedElement::zero(base, universe);
        let mut images = Vec::with_capacity(universe.len());
        for g in universe.generators() {
            if g.kind != GeneratorKind::Antighost {
                images.push(zero.clone());
                continue;
            }
            let row = |m: &RatMatrix| m.row(g.index).to_vec();
            let img = if g.r == 1 {
                let rp = row(&pr.r)
                    .iter()
                    .zip(&p)
                    .filter(|(c, _)| !c.is_zero())
                    .fold(Polynomial::zero(base), |acc, (c, x)| &acc + &x.scale(c));
                GradedElement::from_poly(universe, rp)
            } else {
                let coeffs = if g.r % 2 == 0 { row(&pr.p) } else { row(&pr.r) };
                let mut acc = zero.clone();
                for (k, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let lower = Generator::new(GeneratorKind::Antighost, k, g.r - 1);
                    let e = GradedElement::from_generator(base, universe, lower)?;
                    acc = acc.try_add(&e.scale(c))?;
                }
                acc
            };
            images.push(img);
        }
        let derivation = GradedDerivation::new(vec![zero; base.len()], images.clone(), true)?;
        Ok(Self {
            base: Arc::clone(base),
            universe: Arc::clone(universe),
            derivation,
            images,
        })
    }

    pub fn apply(&self, f: &GradedElement) -> Result<GradedElement> {
        self.derivation.apply(f)
    }

    /// `δ` of the generator at universe index `k`.
    pub fn image(&self, k: usize) -> &GradedElement {
        &self.images[k]
    }

    pub fn universe(&self) -> &Arc<GeneratorUniverse> {
        &self.universe
    }

    pub fn base(&self) -> &Arc<VariableTable> {
        &self.base
    }
}

pub fn kt_delta(tower: &AntighostTower, pr: &Projectors, f: &GradedElement) -> Result<GradedElement> {
    KtDifferential::new(tower, pr)?.apply(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct NilpotencyReport {
    pub passed: bool,
    pub checked: usize,
    /// `δ²(x) ≠ 0` for the first failing element, as text.
    pub witness: Option<String>,
}

/// Generator monomials over `universe` of total degree `≤ degree`, odd exponents at most 1.
fn generator_monomials(universe: &GeneratorUniverse, degree: u32) -> Vec<GradedMonomial> {
    fn rec(u: &GeneratorUniverse, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<GradedMonomial>) {
        if i == cur.len() {
            out.push(GradedMonomial(cur.clone()));
            return;
        }
        let cap = if u.is_odd(i) { left.min(1) } else { left };
        for e in 0..=cap {
            cur[i] = e;
            rec(u, i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(universe, 0, degree, &mut vec![0; universe.len()], &mut out);
    out
}

/// Checks `δ² = 0` on every generator monomial of degree `≤ degree` and on
/// base-variable multiples of single generators.
pub fn nilpotency_check(tower: &AntighostTower, pr: &Projectors, degree: u32) -> Result<NilpotencyReport> {
    let d = KtDifferential::new(tower, pr)?;
    let base = tower.base();
    let u = tower.universe();
    let mut candidates: Vec<GradedElement> = generator_monomials(u, degree)
        .into_iter()
        .filter(|m| !m.is_unit())
        .map(|m| GradedElement::from_term(base, u, m, Polynomial::one(base)))
        .collect();
    for k in 0..u.len() {
        for v in 0..base.len() {
            let g = GradedElement::generator(base, u, k);
            candidates.push(g.mul_poly(&Polynomial::var(base, v))?);
        }
    }
    let mut checked = 0;
    for x in &candidates {
        let dd = d.apply(&d.apply(x)?)?;
        checked += 1;
        if !dd.is_zero() {
            return Ok(NilpotencyReport {
                passed: false,
                checked,
                witness: Some(format!("δ²({x}) = {dd}")),
            });
        }
    }
    Ok(NilpotencyReport {
        passed: true,
        checked,
        witness: None,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HomologyEntry {
    pub k: u32,
    pub d: u32,
    pub dim: usize,
    pub ker: usize,
    pub im: usize,
    pub h: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub r_max: u32,
    pub degree_cap: u32,
    pub entries: Vec<HomologyEntry>,
    /// `Σ_{d ≤ D−1} dim H_{k,d}` per `k`.
    pub cumulative: Vec<usize>,
    /// Monomial count of polynomial functions on the constraint surface, per degree.
    pub surface_dims: Vec<usize>,
    /// `H₀` matches the surface count in every degree and `H_k = 0` for `k ≥ 1`.
    pub resolves: bool,
    /// No constraints: every statement holds trivially.
    pub vacuous: bool,
}

impl HomologyReport {
    pub fn h(&self, k: u32, d: u32) -> Option<usize> {
        self.entries.iter().find(|e| e.k == k && e.d == d).map(|e| e.h)
    }
}

/// Basis of the chain space with antighost number `k` and total degree `d`.
fn chain_basis(universe: &GeneratorUniverse, nbase: usize, k: u32, d: u32) -> Vec<(GradedMonomial, Monomial)> {
    let mut out = Vec::new();
    for gm in generator_monomials(universe, d.min(k)) {
        if gm.antighost_number(universe) != k {
            continue;
        }
        let g = gm.degree();
        if g > d {
            continue;
        }
        for bm in monomials_of_degree(nbase, d - g) {
            out.push((gm.clone(), bm));
        }
    }
    out
}

fn delta_rank(
    delta: &KtDifferential,
    k: u32,
    d: u32,
) -> Result<(usize, usize)> {
    let u = delta.universe();
    let base = delta.base();
    let nb = base.len();
    let source = chain_basis(u, nb, k, d);
    if k == 0 {
        return Ok((source.len(), 0));
    }
    let target = chain_basis(u, nb, k - 1, d);
    let index: HashMap<(GradedMonomial, Monomial), usize> =
        target.into_iter().enumerate().map(|(i, key)| (key, i)).collect();
    let mut cache: HashMap<GradedMonomial, GradedElement> = HashMap::new();
    let mut echelon: Echelon<usize> = Echelon::new();
    for (gm, bm) in &source {
        if !cache.contains_key(gm) {
            let e = GradedElement::from_term(base, u, gm.clone(), Polynomial::one(base));
            cache.insert(gm.clone(), delta.apply(&e)?);
        }
        let img = &cache[gm];
        let mut row: SparseVec<usize> = SparseVec::new();
        for (m, coeff) in img.terms() {
            for (pm, c) in coeff.terms() {
                let shifted: Monomial = pm.iter().zip(bm).map(|(a, b)| a + b).collect();
                let idx = *index
                    .get(&(m.clone(), shifted))
                    .ok_or_else(|| Error::Parity("δ left the expected graded piece".into()))?;
                let entry = row.entry(idx).or_insert_with(Rational::zero);
                *entry += c;
                if entry.is_zero() {
                    row.remove(&idx);
                }
            }
        }
        echelon.insert(row);
    }
    Ok((source.len(), echelon.rank()))
}

fn homology_of(delta: &KtDifferential, pr: &Projectors, k_max: u32, r_max: u32, degree: u32) -> Result<HomologyReport> {
    let nb = delta.base().len();
    let surface_vars = nb - pr.dim() + (pr.dim() - pr.r.rank());
    let surface_dims: Vec<usize> = (0..degree).map(|d| monomials_of_degree(surface_vars, d).len()).collect();
    let mut entries = Vec::new();
    let mut cumulative = vec![0; k_max as usize + 1];
    for d in 0..degree {
        for k in 0..=k_max {
            let (dim, rank_out) = delta_rank(delta, k, d)?;
            let (_, im) = delta_rank(delta, k + 1, d)?;
            let ker = dim - rank_out;
            let h = ker.checked_sub(im).ok_or_else(|| Error::Parity("image exceeds kernel".into()))?;
            cumulative[k as usize] += h;
            entries.push(HomologyEntry { k, d, dim, ker, im, h });
        }
    }
    let resolves = entries.iter().all(|e| {
        if e.k == 0 {
            e.h == surface_dims[e.d as usize]
        } else {
            e.h == 0
        }
    });
    Ok(HomologyReport {
        r_max,
        degree_cap: degree,
        entries,
        cumulative,
        surface_dims,
        resolves,
        vacuous: pr.is_regular(),
    })
}

/// `dim H_k` in every total degree `d ≤ degree − 1` for `k ≤ k_max`, where
/// `k_max ≤ R_max − 1`.
pub fn homology(tower: &AntighostTower, pr: &Projectors, k_max: u32, degree: u32) -> Result<HomologyReport> {
    if k_max >= tower.r_max() {
        return Err(Error::Truncation {
            k: k_max,
            r_max: tower.r_max(),
        });
    }
    let delta = KtDifferential::over(tower.base(), &tower.antighost_universe(), pr)?;
    homology_of(&delta, pr, k_max, tower.r_max(), degree)
}

#[derive(Clone, Debug, Serialize)]
pub struct IrreducibleReport {
    /// Generator names of the sub-tower.
    pub generators: Vec<String>,
    pub h0_matches: bool,
    pub h1_vanishes: bool,
    pub homology: HomologyReport,
}

/// For diagonal `a`, the first-level antighosts along the constraint
/// directions (`R_ii ≠ 0`) already resolve the constraint surface.
pub fn irreducible_subcomplex(
    tower: &AntighostTower,
    a: &RatMatrix,
    pr: &Projectors,
    degree: u32,
) -> Result<Option<IrreducibleReport>> {
    if !a.is_diagonal() {
        return Ok(None);
    }
    let gens: Vec<Generator> = (0..tower.dim())
        .filter(|&i| !pr.r[(i, i)].is_zero())
        .map(|i| Generator::new(GeneratorKind::Antighost, i, 1))
        .collect();
    let universe = GeneratorUniverse::new(gens);
    let delta = KtDifferential::over(tower.base(), &universe, pr)?;
    let rep = homology_of(&delta, pr, 1, 2, degree)?;
    let h0_matches = rep
        .entries
        .iter()
        .filter(|e| e.k == 0)
        .all(|e| e.h == rep.surface_dims[e.d as usize]);
    let h1_vanishes = rep.entries.iter().filter(|e| e.k == 1).all(|e| e.h == 0);
    Ok(Some(IrreducibleReport {
        generators: universe.generators().iter().map(Generator::name).collect(),
        h0_matches,
        h1_vanishes,
        homology: rep,
    }))
}

/// Monomial count with total degree at most `d` in `nvars` variables.
pub fn monomial_count_up_to(nvars: usize, d: u32) -> usize {
    monomials_up_to(nvars, d).len()
}

/// `R′ = R + ε·E₁₁`-style perturbation used as a negative control: adds `eps`
/// to every diagonal entry of `R` and keeps `P`.
pub fn perturbed_projectors(pr: &Projectors, eps: &Rational) -> Projectors {
    let n = pr.dim();
    let shift = RatMatrix::identity(n).scale(eps);
    Projectors::from_raw(pr.p.clone(), &pr.r + &shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::{compute_sigma0, projectors_of};
    use crate::rational::rat;

    fn diag_projectors() -> Projectors {
        projectors_of(&compute_sigma0(&RatMatrix::from_i64(&[&[1, 0], &[0, 0]])).unwrap())
    }

    #[test]
    fn tower_counts() {
        let t = build_tower(2, 1, 1, false).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.universe().generators().iter().all(Generator::is_odd));
        let t = build_tower(2, 1, 4, false).unwrap();
        assert_eq!(t.len(), 8);
        let parities: Vec<bool> = (1..=4).map(|r| Generator::new(GeneratorKind::Antighost, 0, r).is_odd()).collect();
        assert_eq!(parities, [true, false, true, false]);
        let t = build_tower(2, 1, 2, true).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t.summary().pairing.len(), 4);
    }

    #[test]
    fn delta_examples() {
        let t = build_tower(2, 1, 4, false).unwrap();
        let pr = diag_projectors();
        let d = KtDifferential::new(&t, &pr).unwrap();
        let (b, u) = (t.base(), t.universe());
        let c = |i, r| GradedElement::from_generator(b, u, Generator::new(GeneratorKind::Antighost, i, r)).unwrap();
        assert_eq!(d.apply(&c(1, 1)).unwrap().to_string(), "p2");
        assert!(d.apply(&c(0, 1)).unwrap().is_zero());
        assert!(d.apply(&c(1, 2)).unwrap().is_zero());
        assert_eq!(d.apply(&c(0, 2)).unwrap(), c(0, 1));
        let q1c2 = c(1, 1).mul_poly(&Polynomial::var_named(b, "q1").unwrap()).unwrap();
        assert_eq!(d.apply(&q1c2).unwrap().to_string(), "q1*p2");
    }

    #[test]
    fn nilpotency_and_negative_control() {
        let t = build_tower(2, 1, 4, false).unwrap();
        let pr = diag_projectors();
        assert!(nilpotency_check(&t, &pr, 3).unwrap().passed);
        let rank1 = projectors_of(&compute_sigma0(&RatMatrix::from_i64(&[&[1, 1], &[1, 1]])).unwrap());
        assert!(nilpotency_check(&t, &rank1, 3).unwrap().passed);
        let bad = Projectors::from_raw(pr.p.clone(), RatMatrix::diag(&[rat(1, 2), rat(3, 2)]));
        let rep = nilpotency_check(&t, &bad, 3).unwrap();
        assert!(!rep.passed);
        assert!(rep.witness.unwrap().contains("c1_2"));
    }

    #[test]
    fn homology_diag() {
        let t = build_tower(2, 1, 4, false).unwrap();
        let pr = diag_projectors();
        let rep = homology(&t, &pr, 2, 3).unwrap();
        assert_eq!(rep.cumulative[0], 15);
        assert_eq!(rep.cumulative[1], 0);
        assert_eq!(rep.cumulative[2], 0);
        assert!(rep.resolves);
        assert!(matches!(homology(&t, &pr, 4, 3), Err(Error::Truncation { .. })));
    }

    #[test]
    fn regular_case_is_vacuous() {
        let t = build_tower(2, 1, 2, false).unwrap();
        let pr = projectors_of(&compute_sigma0(&RatMatrix::identity(2)).unwrap());
        let rep = homology(&t, &pr, 0, 3).unwrap();
        assert!(rep.vacuous);
        assert_eq!(rep.cumulative[0], monomial_count_up_to(5, 2));
    }

    #[test]
    fn irreducible_examples() {
        let t = build_tower(2, 1, 3, false).unwrap();
        let a = RatMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        let rep = irreducible_subcomplex(&t, &a, &diag_projectors(), 3).unwrap().unwrap();
        assert_eq!(rep.generators, ["c2_1"]);
        assert!(rep.h0_matches && rep.h1_vanishes);
        let full = RatMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        let pr = projectors_of(&compute_sigma0(&full).unwrap());
        assert!(irreducible_subcomplex(&t, &full, &pr, 3).unwrap().is_none());
        let zero = RatMatrix::zeros(2, 2);
        let pr = projectors_of(&compute_sigma0(&zero).unwrap());
        let rep = irreducible_subcomplex(&t, &zero, &pr, 3).unwrap().unwrap();
        assert_eq!(rep.generators, ["c1_1", "c2_1"]);
        assert!(rep.h0_matches && rep.h1_vanishes);
    }
}
