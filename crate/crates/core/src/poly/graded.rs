//! Graded commutative algebra over polynomial coefficients.
//!
//! Generators carry an antighost number `r`; their Grassmann parity is `r mod 2`.
//! Odd generators anticommute and square to zero, even ones commute freely.
//! Monomials keep generators in the universe order, which is sorted by
//! `(r, index, kind)`, and the reordering sign is folded into the coefficient.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{Poly, Polynomial, VariableTable};
use crate::error::{Error, Result};
use crate::rational::{Coefficient, GaussianRational, Rational};

/// The four families of odd/even fibre coordinates used by the tower and the BRST extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GeneratorKind {
    /// `c_i^(r)`, transforms like a momentum.
    Antighost,
    /// `c̄^i_(r)`, conjugate to `c_i^(r)`.
    Ghost,
    /// `c^i_(r)`.
    AntighostConj,
    /// `c̄_i^(r)`, conjugate to `c^i_(r)`.
    GhostConj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    /// Zero-based fibre (or composite) index.
    pub index: usize,
    /// Antighost number, at least 1.
    pub r: u32,
}

impl Generator {
    pub fn new(kind: GeneratorKind, index: usize, r: u32) -> Self {
        assert!(r >= 1, "antighost number starts at 1");
        Self { kind, index, r }
    }

    pub fn is_odd(&self) -> bool {
        self.r % 2 == 1
    }

    pub fn name(&self) -> String {
        let stem = match self.kind {
            GeneratorKind::Antighost => "c",
            GeneratorKind::Ghost => "cbar",
            GeneratorKind::AntighostConj => "cup",
            GeneratorKind::GhostConj => "cbarlo",
        };
        format!("{stem}{}_{}", self.index + 1, self.r)
    }

    fn sort_key(&self) -> (u32, usize, GeneratorKind) {
        (self.r, self.index, self.kind)
    }
}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// Ordered, duplicate-free set of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorUniverse {
    gens: Vec<Generator>,
    lookup: HashMap<Generator, usize>,
}

impl GeneratorUniverse {
    pub fn new(mut gens: Vec<Generator>) -> Arc<Self> {
        gens.sort();
        gens.dedup();
        let lookup = gens.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        Arc::new(Self { gens, lookup })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn get(&self, idx: usize) -> Generator {
        self.gens[idx]
    }

    pub fn index_of(&self, g: Generator) -> Option<usize> {
        self.lookup.get(&g).copied()
    }

    pub fn require(&self, g: Generator) -> Result<usize> {
        self.index_of(g)
            .ok_or_else(|| Error::UnknownVariable(g.name()))
    }

    pub fn is_odd(&self, idx: usize) -> bool {
        self.gens[idx].is_odd()
    }
}

/// Exponent vector over a generator universe; odd entries are 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedMonomial(pub Vec<u32>);

impl GradedMonomial {
    pub fn unit(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Grassmann parity: `true` when odd.
    pub fn parity(&self, u: &GeneratorUniverse) -> bool {
        self.0
            .iter()
            .enumerate()
            .filter(|&(i, &e)| e > 0 && u.is_odd(i))
            .count()
            % 2
            == 1
    }

    pub fn antighost_number(&self, u: &GeneratorUniverse) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| e * u.get(i).r)
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Product in normal form, with its sign, or `None` if an odd generator repeats.
    pub fn mul(&self, other: &Self, u: &GeneratorUniverse) -> Option<(Self, bool)> {
        let mut inversions = 0usize;
        let mut odd_seen_in_other_below = 0usize;
        // Count pairs (i in self, j in other) with i > j among odd generators.
        let mut odd_other_prefix = Vec::with_capacity(self.0.len());
        for i in 0..self.0.len() {
            odd_other_prefix.push(odd_seen_in_other_below);
            if u.is_odd(i) && other.0[i] > 0 {
                odd_seen_in_other_below += 1;
            }
        }
        let mut exps = Vec::with_capacity(self.0.len());
        for (i, (&a, &b)) in self.0.iter().zip(&other.0).enumerate() {
            if u.is_odd(i) {
                if a > 0 && b > 0 {
                    return None;
                }
                if a > 0 {
                    inversions += odd_other_prefix[i];
                }
            }
            exps.push(a + b);
        }
        Some((Self(exps), inversions % 2 == 1))
    }

    /// Left derivative by generator `k`: the reduced monomial, its sign, and the
    /// multiplicity factor, or `None` if `k` is absent.
    pub fn left_derivative(&self, k: usize, u: &GeneratorUniverse) -> Option<(Self, bool, u32)> {
        let e = self.0[k];
        if e == 0 {
            return None;
        }
        let mut exps = self.0.clone();
        exps[k] -= 1;
        if u.is_odd(k) {
            let before = (0..k).filter(|&i| u.is_odd(i) && self.0[i] > 0).count();
            Some((Self(exps), before % 2 == 1, 1))
        } else {
            Some((Self(exps), false, e))
        }
    }
}

/// Element `Σ f_M(t,q,p) · M` with polynomial coefficients `f_M` and graded monomials `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElement<C: Coefficient = Rational> {
    base: Arc<VariableTable>,
    universe: Arc<GeneratorUniverse>,
    terms: BTreeMap<GradedMonomial, Poly<C>>,
}

impl<C: Coefficient> GradedElement<C> {
    pub fn zero(base: &Arc<VariableTable>, universe: &Arc<GeneratorUniverse>) -> Self {
        Self {
            base: Arc::clone(base),
            universe: Arc::clone(universe),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(universe: &Arc<GeneratorUniverse>, f: Poly<C>) -> Self {
        let mut out = Self::zero(f.table(), universe);
        out.add_term(GradedMonomial::unit(universe.len()), f);
        out
    }

    pub fn one(base: &Arc<VariableTable>, universe: &Arc<GeneratorUniverse>) -> Self {
        Self::from_poly(universe, Poly::one(base))
    }

    pub fn generator(base: &Arc<VariableTable>, universe: &Arc<GeneratorUniverse>, idx: usize) -> Self {
        let mut m = GradedMonomial::unit(universe.len());
        m.0[idx] = 1;
        Self::from_term(base, universe, m, Poly::one(base))
    }

    pub fn from_generator(
        base: &Arc<VariableTable>,
        universe: &Arc<GeneratorUniverse>,
        g: Generator,
    ) -> Result<Self> {
        Ok(Self::generator(base, universe, universe.require(g)?))
    }

    pub fn from_term(
        base: &Arc<VariableTable>,
        universe: &Arc<GeneratorUniverse>,
        m: GradedMonomial,
        coeff: Poly<C>,
    ) -> Self {
        let mut out = Self::zero(base, universe);
        out.add_term(m, coeff);
        out
    }

    fn add_term(&mut self, m: GradedMonomial, coeff: Poly<C>) {
        if coeff.is_zero() {
            return;
        }
        assert_eq!(m.0.len(), self.universe.len(), "graded monomial length");
        match self.terms.remove(&m) {
            Some(existing) => {
                let sum = &existing + &coeff;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, coeff);
            }
        }
    }

    pub fn base(&self) -> &Arc<VariableTable> {
        &self.base
    }

    pub fn universe(&self) -> &Arc<GeneratorUniverse> {
        &self.universe
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GradedMonomial, &Poly<C>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the generator-free part.
    pub fn body(&self) -> Poly<C> {
        self.terms
            .get(&GradedMonomial::unit(self.universe.len()))
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.base))
    }

    pub fn coefficient(&self, m: &GradedMonomial) -> Poly<C> {
        self.terms.get(m).cloned().unwrap_or_else(|| Poly::zero(&self.base))
    }

    /// Common parity of all terms, `None` if mixed. The zero element counts as even.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.universe));
        match it.next() {
            None => Some(false),
            Some(first) => it.all(|p| p == first).then_some(first),
        }
    }

    /// Splits into even and odd parts.
    pub fn parity_parts(&self) -> (Self, Self) {
        let mut even = Self::zero(&self.base, &self.universe);
        let mut odd = Self::zero(&self.base, &self.universe);
        for (m, c) in &self.terms {
            if m.parity(&self.universe) {
                odd.terms.insert(m.clone(), c.clone());
            } else {
                even.terms.insert(m.clone(), c.clone());
            }
        }
        (even, odd)
    }

    /// Common antighost number of all terms, `None` if mixed or zero.
    pub fn antighost_number(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.antighost_number(&self.universe));
        let first = it.next()?;
        it.all(|k| k == first).then_some(first)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if *self.base != *other.base || *self.universe != *other.universe {
            return Err(Error::TableMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Graded product; odd squares vanish and odd swaps flip sign.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Self::zero(&self.base, &self.universe);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(mb, &self.universe) {
                    let c = ca.try_mul(cb)?;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-C::one())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_coefficients(|p| p.scale(c))
    }

    /// Multiplies every coefficient by a base polynomial.
    pub fn mul_poly(&self, f: &Poly<C>) -> Result<Self> {
        let mut out = Self::zero(&self.base, &self.universe);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.try_mul(f)?);
        }
        Ok(out)
    }

    fn map_coefficients(&self, f: impl Fn(&Poly<C>) -> Poly<C>) -> Self {
        let mut out = Self::zero(&self.base, &self.universe);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Derivative along a base variable (an even direction).
    pub fn partial_base(&self, idx: usize) -> Self {
        self.map_coefficients(|c| c.partial(idx))
    }

    /// Left derivative `∂/∂θ_k`.
    pub fn partial_generator(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.base, &self.universe);
        for (m, c) in &self.terms {
            if let Some((dm, neg, mult)) = m.left_derivative(k, &self.universe) {
                let mut coeff = c.scale(&C::from_rational(Rational::from_integer(mult.into())));
                if neg {
                    coeff = -coeff;
                }
                out.add_term(dm, coeff);
            }
        }
        out
    }

    /// Re-expresses coefficients over another table, matching variables by name.
    pub fn embed_base(&self, target: &Arc<VariableTable>) -> Result<Self> {
        let mut out = Self::zero(target, &self.universe);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.embed(target)?);
        }
        Ok(out)
    }

    /// Re-expresses over a larger universe containing every generator used.
    pub fn embed_universe(&self, target: &Arc<GeneratorUniverse>) -> Result<Self> {
        let map: Vec<usize> = self
            .universe
            .generators()
            .iter()
            .map(|g| target.require(*g))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(&self.base, target);
        for (m, c) in &self.terms {
            let mut tm = GradedMonomial::unit(target.len());
            for (i, &e) in m.0.iter().enumerate() {
                tm.0[map[i]] = e;
            }
            // Universe order is a sub-order of the target, so no reordering sign arises.
            out.add_term(tm, c.clone());
        }
        Ok(out)
    }
}

impl GradedElement<Rational> {
    pub fn to_gaussian(&self) -> GradedElement<GaussianRational> {
        let mut out = GradedElement::zero(&self.base, &self.universe);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.to_gaussian());
        }
        out
    }
}

impl GradedElement<GaussianRational> {
    /// Real part, if every coefficient is real.
    pub fn to_real(&self) -> Option<GradedElement<Rational>> {
        let mut out = GradedElement::zero(&self.base, &self.universe);
        for (m, c) in &self.terms {
            let mut re = Polynomial::zero(&self.base);
            for (mono, z) in c.terms() {
                re = &re + &Polynomial::monomial(&self.base, mono.clone(), z.as_real()?.clone());
            }
            out.add_term(m.clone(), re);
        }
        Some(out)
    }
}

impl<C: Coefficient> fmt::Display for GradedElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mut gens = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = self.universe.get(i).name();
                gens.push(if e > 1 { format!("{name}^{e}") } else { name });
            }
            let coeff = c.to_string();
            if gens.is_empty() {
                write!(f, "{coeff}")?;
            } else if c.is_constant() && c.constant_term().is_one() {
                write!(f, "{}", gens.join("*"))?;
            } else if c.num_terms() == 1 {
                write!(f, "{coeff}*{}", gens.join("*"))?;
            } else {
                write!(f, "({coeff})*{}", gens.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Graded derivation `u = Σ u^x ∂_x + Σ u^θ ∂_θ` acting from the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDerivation<C: Coefficient = Rational> {
    base_components: Vec<GradedElement<C>>,
    generator_components: Vec<GradedElement<C>>,
    odd: bool,
}

impl<C: Coefficient> GradedDerivation<C> {
    /// Validates that each nonzero component `u^a` has parity `|u| + |a|`.
    pub fn new(
        base_components: Vec<GradedElement<C>>,
        generator_components: Vec<GradedElement<C>>,
        odd: bool,
    ) -> Result<Self> {
        for (i, c) in base_components.iter().enumerate() {
            if !c.is_zero() && c.parity() != Some(odd) {
                return Err(Error::Parity(format!("component along base variable {i}")));
            }
        }
        for (k, c) in generator_components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let want = odd ^ c.universe().is_odd(k);
            if c.parity() != Some(want) {
                return Err(Error::Parity(format!(
                    "component along {}",
                    c.universe().get(k).name()
                )));
            }
        }
        Ok(Self {
            base_components,
            generator_components,
            odd,
        })
    }

    /// The derivation with all components zero except along generator `k`.
    pub fn along_generator(
        base: &Arc<VariableTable>,
        universe: &Arc<GeneratorUniverse>,
        k: usize,
        component: GradedElement<C>,
    ) -> Result<Self> {
        let odd = component.parity().ok_or_else(|| Error::Parity("mixed component".into()))?
            ^ universe.is_odd(k);
        let zero = GradedElement::zero(base, universe);
        let mut gens = vec![zero.clone(); universe.len()];
        gens[k] = component;
        Self::new(vec![zero; base.len()], gens, odd)
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn apply(&self, f: &GradedElement<C>) -> Result<GradedElement<C>> {
        if self.base_components.len() != f.base().len() {
            return Err(Error::TableMismatch);
        }
        if self.generator_components.len() != f.universe().len() {
            return Err(Error::TableMismatch);
        }
        let mut out = GradedElement::zero(f.base(), f.universe());
        for (i, u) in self.base_components.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            let d = f.partial_base(i);
            if !d.is_zero() {
                out = out.try_add(&u.try_mul(&d)?)?;
            }
        }
        for (k, u) in self.generator_components.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            let d = f.partial_generator(k);
            if !d.is_zero() {
                out = out.try_add(&u.try_mul(&d)?)?;
            }
        }
        Ok(out)
    }
}

/// Checked graded product.
pub fn graded_mul<C: Coefficient>(f: &GradedElement<C>, g: &GradedElement<C>) -> Result<GradedElement<C>> {
    f.try_mul(g)
}

/// Checked application of a derivation.
pub fn apply_derivation<C: Coefficient>(
    u: &GradedDerivation<C>,
    f: &GradedElement<C>,
) -> Result<GradedElement<C>> {
    u.apply(f)
}
