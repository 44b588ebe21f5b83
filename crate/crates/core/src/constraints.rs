//! Poisson brackets, constraint ideals, classification and the Dirac algorithm
//! driven by `ℋ* = pt + ℋ`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianData;
use crate::ideal::{solve_sparse, GradedKey, SparseVec, TruncatedIdeal};
use crate::poly::{monomials_up_to, Poly, Polynomial, VariableTable};
use crate::rational::{denominator_lcm, Coefficient, Rational};

pub use crate::hamiltonian::modified_hamiltonian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BracketKind {
    /// `(q, p)` on the vertical cotangent bundle.
    V,
    /// `(t, pt, q, p)` on the full cotangent bundle.
    T,
    /// `(q, p, qd, pd)` with conjugate pairs `(q, pd)` and `(qd, p)`.
    VV,
}

fn require(table: &VariableTable, kind: BracketKind) -> Result<()> {
    let m = table.positions();
    if table.momenta() != m {
        return Err(Error::Unsupported("brackets need as many momenta as positions".into()));
    }
    let ok = match kind {
        BracketKind::V => true,
        BracketKind::T => table.time_momentum().is_some() && table.time().is_some(),
        BracketKind::VV => (0..m).all(|i| {
            table.position_vertical(i).is_some() && table.momentum_vertical(i).is_some()
        }),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("table {table} does not carry the {kind:?} bracket")))
    }
}

fn term<C: Coefficient>(f: &Poly<C>, g: &Poly<C>, i: usize, j: usize) -> Poly<C> {
    let df = f.partial(i);
    if df.is_zero() {
        return df;
    }
    &df * &g.partial(j)
}

/// Canonical bracket of the given kind. `{p₁, q¹}_V = 1`.
pub fn poisson<C: Coefficient>(kind: BracketKind, f: &Poly<C>, g: &Poly<C>) -> Result<Poly<C>> {
    if f.table() != g.table() {
        return Err(Error::TableMismatch);
    }
    let table = f.table();
    require(table, kind)?;
    let mut out = Poly::zero(table);
    for i in 0..table.positions() {
        let q = table.position(i).expect("q");
        let p = table.momentum(i).expect("p");
        match kind {
            BracketKind::V | BracketKind::T => {
                out = &out + &term(f, g, p, q);
                out = &out - &term(g, f, p, q);
            }
            BracketKind::VV => {
                let qd = table.position_vertical(i).expect("qd");
                let pd = table.momentum_vertical(i).expect("pd");
                out = &out + &term(f, g, pd, q);
                out = &out - &term(f, g, q, pd);
                out = &out + &term(f, g, p, qd);
                out = &out - &term(f, g, qd, p);
            }
        }
    }
    if kind == BracketKind::T {
        let t = table.time().expect("t");
        let pt = table.time_momentum().expect("pt");
        out = &out + &term(f, g, pt, t);
        out = &out - &term(g, f, pt, t);
    }
    Ok(out)
}

/// `ℋ* = pt + ℋ` on the extended table.
pub fn hstar(h: &HamiltonianData) -> Result<Polynomial> {
    let m = h.table().positions();
    if h.table().momenta() != m {
        return Err(Error::Unsupported("ℋ* needs n = 1".into()));
    }
    let ext = VariableTable::extended(m);
    Ok(&h.h.embed(&ext)? + &Polynomial::var_named(&ext, "pt")?)
}

/// `{ℋ*, f}_T` pulled back to the phase-space table.
pub fn evolution(h: &HamiltonianData, f: &Polynomial) -> Result<Polynomial> {
    let ext = VariableTable::extended(h.table().positions());
    let hs = hstar(h)?;
    let g = poisson(BracketKind::T, &hs, &f.embed(&ext)?)?;
    let pt = ext.time_momentum().expect("pt");
    if g.depends_on(pt) {
        return Err(Error::InvalidConfig("evolution bracket depends on pt".into()));
    }
    g.embed(h.table())
}

/// Clears denominators, removes integer content and makes the leading coefficient positive.
pub fn normalize(f: &Polynomial) -> Polynomial {
    if f.is_zero() {
        return f.clone();
    }
    let lcm = denominator_lcm(f.terms().map(|(_, c)| c));
    let ints: Vec<BigInt> = f
        .terms()
        .map(|(_, c)| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut scale = Rational::new(lcm, content);
    if f.leading_term().expect("nonzero").1.is_negative() {
        scale = -scale;
    }
    f.scale(&scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiracStatus {
    Closed,
    /// A nonzero constant was produced.
    Inconsistent,
    GenerationBound,
    DegreeOverflow,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracReport {
    /// Generation 0 holds the primary constraints.
    #[serde(serialize_with = "ser_generations")]
    pub generations: Vec<Vec<Polynomial>>,
    pub status: DiracStatus,
    pub truncation_degree: u32,
    pub generation_bound: usize,
    /// `{ℋ*, f}_T` lies in the final span for every generator.
    pub closure_verified: bool,
}

impl DiracReport {
    pub fn constraints(&self) -> Vec<Polynomial> {
        self.generations.iter().flatten().cloned().collect()
    }
}

fn ser_generations<S: serde::Serializer>(g: &[Vec<Polynomial>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(g.iter().map(|gen| gen.iter().map(ToString::to_string).collect::<Vec<_>>()))
}

fn ser_polys<S: serde::Serializer>(v: &[Polynomial], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

/// Provenance label for the constraints of a generation.
pub fn generation_tag(g: usize) -> String {
    match g {
        0 => "primary".into(),
        1 => "secondary".into(),
        2 => "tertiary".into(),
        3 => "quaternary".into(),
        _ => format!("generation {g}"),
    }
}

/// Iterates `{ℋ*, f}_T` over the newest generation until the truncated span closes.
/// The default generation bound is `10·m`.
pub fn dirac_algorithm(
    h: &HamiltonianData,
    primary: &[Polynomial],
    degree: u32,
    generation_bound: Option<usize>,
) -> Result<DiracReport> {
    if primary.is_empty() {
        return Err(Error::InvalidConfig("no primary constraints".into()));
    }
    let table = Arc::clone(h.table());
    let bound = generation_bound.unwrap_or(10 * table.positions());
    let mut ideal = TruncatedIdeal::new(&table, &[], degree)?;
    let mut first = Vec::new();
    for f in primary {
        let f = f.embed(&table)?;
        if f.is_zero() {
            continue;
        }
        if f.degree() > degree {
            return Err(Error::DegreeOverflow {
                degree: f.degree(),
                cap: degree,
            });
        }
        if ideal.add_generator(&f)? {
            first.push(normalize(&f));
        }
    }
    let mut generations = vec![first];
    let mut status = DiracStatus::Closed;
    'outer: loop {
        let latest = generations.last().expect("nonempty");
        let mut next = Vec::new();
        for f in latest {
            let g = evolution(h, f)?;
            if g.degree() > degree {
                status = DiracStatus::DegreeOverflow;
                break 'outer;
            }
            let r = ideal.reduce(&g)?;
            if r.is_zero() {
                continue;
            }
            if r.is_constant() {
                generations.push(vec![normalize(&r)]);
                status = DiracStatus::Inconsistent;
                break 'outer;
            }
            let r = normalize(&r);
            ideal.add_generator(&r)?;
            next.push(r);
        }
        if next.is_empty() {
            break;
        }
        generations.push(next);
        if generations.len() > bound {
            status = DiracStatus::GenerationBound;
            break;
        }
    }
    let closure_verified = status == DiracStatus::Closed
        && generations.iter().flatten().all(|f| {
            evolution(h, f)
                .and_then(|g| ideal.contains(&g))
                .unwrap_or(false)
        });
    Ok(DiracReport {
        generations,
        status,
        truncation_degree: degree,
        generation_bound: bound,
        closure_verified,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintClass {
    First,
    Second,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    #[serde(serialize_with = "ser_polys")]
    pub generators: Vec<Polynomial>,
    pub classes: Vec<ConstraintClass>,
    /// `{f_a, f_b}_V` reduced modulo the truncated ideal, as text.
    pub bracket_matrix: Vec<Vec<String>>,
    pub requested_degree: u32,
    /// Degree actually used, raised to fit every bracket.
    pub effective_degree: u32,
    pub coisotropic: bool,
}

/// First class iff every bracket with a generator lies in the truncated ideal.
pub fn classify(generators: &[Polynomial], degree: u32) -> Result<ClassificationReport> {
    let n = generators.len();
    let mut brackets = vec![vec![]; n];
    let mut needed = degree;
    for (a, f) in generators.iter().enumerate() {
        for g in generators {
            let b = poisson(BracketKind::V, f, g)?;
            needed = needed.max(b.degree()).max(f.degree());
            brackets[a].push(b);
        }
    }
    let table = match generators.first() {
        Some(f) => Arc::clone(f.table()),
        None => {
            return Ok(ClassificationReport {
                generators: vec![],
                classes: vec![],
                bracket_matrix: vec![],
                requested_degree: degree,
                effective_degree: degree,
                coisotropic: true,
            })
        }
    };
    let ideal = TruncatedIdeal::new(&table, generators, needed)?;
    let mut classes = Vec::with_capacity(n);
    let mut matrix = Vec::with_capacity(n);
    for row in &brackets {
        let reduced: Vec<Polynomial> = row.iter().map(|b| ideal.reduce(b)).collect::<Result<_>>()?;
        classes.push(if reduced.iter().all(Polynomial::is_zero) {
            ConstraintClass::First
        } else {
            ConstraintClass::Second
        });
        matrix.push(reduced.iter().map(ToString::to_string).collect());
    }
    Ok(ClassificationReport {
        generators: generators.to_vec(),
        coisotropic: classes.iter().all(|c| *c == ConstraintClass::First),
        classes,
        bracket_matrix: matrix,
        requested_degree: degree,
        effective_degree: needed,
    })
}

/// Solution `f = Σ λ_a g_a` of `{ℋ* + f, g_b}_T ∈ I` for all `b`, with each
/// `λ_a` a polynomial of degree at most `coeff_degree`.
#[derive(Clone, Debug, Serialize)]
pub struct CorrectionReport {
    pub solved: bool,
    pub correction: Option<String>,
    pub truncation_degree: u32,
}

pub fn second_class_correction(
    h: &HamiltonianData,
    generators: &[Polynomial],
    coeff_degree: u32,
    degree: u32,
) -> Result<(CorrectionReport, Option<Polynomial>)> {
    let table = Arc::clone(h.table());
    let ideal = TruncatedIdeal::new(&table, generators, degree)?;
    let monos = monomials_up_to(table.len(), coeff_degree);
    // Column (a, μ): x^μ {g_a, g_b}_V reduced, stacked over b.
    let key = |b: usize, m: crate::poly::Monomial| (b, GradedKey(m));
    let stack = |parts: Vec<Polynomial>| -> SparseVec<(usize, GradedKey)> {
        parts
            .into_iter()
            .enumerate()
            .flat_map(|(b, f)| f.terms().map(|(m, c)| (key(b, m.clone()), c.clone())).collect::<Vec<_>>())
            .collect()
    };
    let mut columns = Vec::new();
    let mut basis = Vec::new();
    for (a, ga) in generators.iter().enumerate() {
        for mono in &monos {
            let x = Polynomial::monomial(&table, mono.clone(), Rational::one());
            let parts = generators
                .iter()
                .map(|gb| {
                    let c = &x * &poisson(BracketKind::V, ga, gb)?;
                    ideal.reduce(&c)
                })
                .collect::<Result<Vec<_>>>()?;
            columns.push(stack(parts));
            basis.push((a, x));
        }
    }
    let rhs_parts = generators
        .iter()
        .map(|gb| ideal.reduce(&evolution(h, gb)?).map(|r| -r))
        .collect::<Result<Vec<_>>>()?;
    let rhs = stack(rhs_parts);
    match solve_sparse(&columns, &rhs) {
        Some(x) => {
            let f = basis
                .iter()
                .zip(&x)
                .filter(|(_, c)| !c.is_zero())
                .fold(Polynomial::zero(&table), |acc, ((a, mono), c)| {
                    &acc + &(&generators[*a] * mono).scale(c)
                });
            Ok((
                CorrectionReport {
                    solved: true,
                    correction: Some(f.to_string()),
                    truncation_degree: degree,
                },
                Some(f),
            ))
        }
        None => Ok((
            CorrectionReport {
                solved: false,
                correction: None,
                truncation_degree: degree,
            },
            None,
        )),
    }
}

/// Projectable vector field `u = u^t ∂_t + u^i(t, q) ∂_i` on configuration space.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub ut: Polynomial,
    pub components: Vec<Polynomial>,
}

impl VectorField {
    fn validate(&self, table: &VariableTable) -> Result<()> {
        if !self.ut.is_constant() {
            return Err(Error::NotProjectable("u^t must be constant".into()));
        }
        if self.components.len() != table.positions() {
            return Err(Error::DimensionMismatch {
                what: "vector field",
                expected: table.positions(),
                found: self.components.len(),
            });
        }
        for f in &self.components {
            if (0..table.momenta()).any(|i| f.depends_on(table.momentum(i).expect("p"))) {
                return Err(Error::NotProjectable("components may depend only on t, q".into()));
            }
        }
        Ok(())
    }

    /// `[u, u′]`; the time component vanishes because both `u^t` are constant.
    pub fn lie_bracket(&self, other: &Self) -> Result<Self> {
        let table = Arc::clone(self.ut.table());
        let t = table.time().expect("t");
        let apply = |u: &Self, f: &Polynomial| -> Polynomial {
            let mut acc = &u.ut * &f.partial(t);
            for (j, uj) in u.components.iter().enumerate() {
                acc = &acc + &(uj * &f.partial(table.position(j).expect("q")));
            }
            acc
        };
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| &apply(self, b) - &apply(other, a))
            .collect();
        Ok(Self {
            ut: Polynomial::zero(&table),
            components,
        })
    }
}

/// `J_u = u^i p_i − u^t ℋ`.
pub fn symmetry_current(u: &VectorField, h: &HamiltonianData) -> Result<Polynomial> {
    let table = h.table();
    u.validate(table)?;
    let mut j = -(&u.ut.embed(table)? * &h.h);
    for (i, ui) in u.components.iter().enumerate() {
        j = &j + &(&ui.embed(table)? * &Polynomial::var(table, table.momentum(i).expect("p")));
    }
    Ok(j)
}

#[derive(Clone, Debug, Serialize)]
pub struct CurrentReport {
    #[serde(serialize_with = "ser_polys")]
    pub currents: Vec<Polynomial>,
    /// `{ℋ*, J}_T = 0` per current.
    pub conserved: Vec<bool>,
    /// `{J_u, J_u′}_V = J_[u,u′]` per ordered pair.
    pub closure: Vec<Vec<bool>>,
    /// `{ℋ*, I_A}_T ⊂ I_A`.
    pub compatible: bool,
    /// `{I_A, I_A}_V ⊂ I_A`.
    pub coisotropic: bool,
    pub truncation_degree: u32,
}

pub fn current_report(fields: &[VectorField], h: &HamiltonianData, degree: u32) -> Result<CurrentReport> {
    let currents: Vec<Polynomial> = fields.iter().map(|u| symmetry_current(u, h)).collect::<Result<_>>()?;
    let table = Arc::clone(h.table());
    let evolutions: Vec<Polynomial> = currents.iter().map(|j| evolution(h, j)).collect::<Result<_>>()?;
    let conserved = evolutions.iter().map(Polynomial::is_zero).collect();
    let mut closure = Vec::new();
    let mut brackets = Vec::new();
    for (a, u) in fields.iter().enumerate() {
        let mut row = Vec::new();
        for (b, v) in fields.iter().enumerate() {
            let br = poisson(BracketKind::V, &currents[a], &currents[b])?;
            let expected = symmetry_current(&u.lie_bracket(v)?, h)?;
            row.push(br == expected);
            brackets.push(br);
        }
        closure.push(row);
    }
    let needed = evolutions
        .iter()
        .chain(&brackets)
        .chain(&currents)
        .map(Polynomial::degree)
        .fold(degree, u32::max);
    let nonzero: Vec<Polynomial> = currents.iter().filter(|j| !j.is_zero()).cloned().collect();
    let ideal = TruncatedIdeal::new(&table, &nonzero, needed)?;
    let compatible = evolutions.iter().map(|e| ideal.contains(e)).collect::<Result<Vec<_>>>()?.into_iter().all(|x| x);
    let coisotropic = brackets.iter().map(|e| ideal.contains(e)).collect::<Result<Vec<_>>>()?.into_iter().all(|x| x);
    Ok(CurrentReport {
        currents,
        conserved,
        closure,
        compatible,
        coisotropic,
        truncation_degree: needed,
    })
}
