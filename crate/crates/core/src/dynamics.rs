//! Hamilton equations `q̇ = ∂ℋ/∂p`, `ṗ = −∂ℋ/∂q` with fixed-step integrators,
//! Euler–Lagrange residuals along trajectories and the associated checks.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::{evolution, poisson, BracketKind};
use crate::error::{Error, Result};
use crate::hamiltonian::{hamiltonian_map, HamiltonianData};
use crate::poly::Polynomial;
use crate::quadratic::{Projectors, QuadraticLagrangian, SigmaSplitting};
use crate::rational::{from_f64, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(t: f64, q: Vec<f64>, p: Vec<f64>) -> Self {
        Self { t, q, p }
    }

    /// `(t, q, p)` flattened in phase-space table order.
    pub fn point(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + self.q.len() + self.p.len());
        v.push(self.t);
        v.extend_from_slice(&self.q);
        v.extend_from_slice(&self.p);
        v
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.iter().chain(&self.p).all(|x| x.is_finite())
    }

    fn exact_point(&self) -> Result<Vec<Rational>> {
        self.point()
            .into_iter()
            .map(|x| from_f64(x).ok_or_else(|| Error::InvalidConfig(format!("non-finite state entry {x}"))))
            .collect()
    }
}

/// A polynomial flattened for fast floating-point evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn new(f: &Polynomial) -> Self {
        let terms = f
            .terms()
            .map(|(m, c)| {
                let vars = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as i32))
                    .collect();
                (to_f64(c), vars)
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, vars)| vars.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

/// Hamilton vector field compiled once for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledField {
    m: usize,
    dq: Vec<CompiledPoly>,
    dp: Vec<CompiledPoly>,
}

impl CompiledField {
    pub fn new(h: &HamiltonianData) -> Result<Self> {
        let table = h.table();
        let m = table.positions();
        if table.momenta() != m {
            return Err(Error::Unsupported("time evolution needs n = 1".into()));
        }
        let dq = hamiltonian_map(h).iter().map(CompiledPoly::new).collect();
        let dp = (0..m)
            .map(|i| CompiledPoly::new(&-h.h.partial(table.position(i).expect("q"))))
            .collect();
        Ok(Self { m, dq, dp })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// `(q̇, ṗ)` at the flattened point `(t, q, p)`.
    pub fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (
            self.dq.iter().map(|f| f.eval(x)).collect(),
            self.dp.iter().map(|f| f.eval(x)).collect(),
        )
    }
}

/// `(q̇, ṗ)` at `s`, evaluated exactly and then rounded.
pub fn hamilton_vector_field(h: &HamiltonianData, s: &PhaseState) -> Result<(Vec<f64>, Vec<f64>)> {
    let table = h.table();
    let m = table.positions();
    if s.q.len() != m || s.p.len() != table.momenta() {
        return Err(Error::DimensionMismatch {
            what: "phase state",
            expected: m,
            found: s.q.len(),
        });
    }
    let x = s.exact_point()?;
    let qdot = hamiltonian_map(h).iter().map(|f| to_f64(&f.evaluate(&x))).collect();
    let pdot = (0..m)
        .map(|i| -to_f64(&h.h.partial(table.position(i).expect("q")).evaluate(&x)))
        .collect();
    Ok((qdot, pdot))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Midpoint,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Self::Rk4),
            "midpoint" => Ok(Self::Midpoint),
            other => Err(Error::InvalidConfig(format!("unknown integrator `{other}`"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rk4 => "rk4",
            Self::Midpoint => "midpoint",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub h: f64,
    pub t_end: f64,
    /// Keep every step; otherwise only the endpoints.
    pub dense: bool,
}

impl IntegratorConfig {
    pub fn rk4(h: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4,
            h,
            t_end,
            dense: true,
        }
    }

    fn validate(&self, t0: f64) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidConfig(format!("step h = {} must be positive", self.h)));
        }
        if !(self.t_end.is_finite() && self.t_end > t0) {
            return Err(Error::InvalidConfig(format!(
                "t_end = {} must exceed the initial time {t0}",
                self.t_end
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub h: f64,
    pub method: Method,
}

impl Trajectory {
    pub fn last(&self) -> &PhaseState {
        self.samples.last().expect("trajectories are nonempty")
    }
}

fn axpy(x: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn step(field: &CompiledField, method: Method, s: &PhaseState, h: f64) -> PhaseState {
    let m = field.dim();
    let f = |t: f64, y: &[f64]| -> Vec<f64> {
        let mut x = Vec::with_capacity(1 + y.len());
        x.push(t);
        x.extend_from_slice(y);
        let (dq, dp) = field.eval(&x);
        dq.into_iter().chain(dp).collect()
    };
    let y: Vec<f64> = s.q.iter().chain(&s.p).copied().collect();
    let next = match method {
        Method::Rk4 => {
            let k1 = f(s.t, &y);
            let k2 = f(s.t + h / 2.0, &axpy(&y, h / 2.0, &k1));
            let k3 = f(s.t + h / 2.0, &axpy(&y, h / 2.0, &k2));
            let k4 = f(s.t + h, &axpy(&y, h, &k3));
            y.iter()
                .enumerate()
                .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect::<Vec<_>>()
        }
        Method::Midpoint => {
            let k1 = f(s.t, &y);
            let k2 = f(s.t + h / 2.0, &axpy(&y, h / 2.0, &k1));
            axpy(&y, h, &k2)
        }
    };
    PhaseState {
        t: s.t + h,
        q: next[..m].to_vec(),
        p: next[m..].to_vec(),
    }
}

/// Fixed-step integration from `s0.t` to `cfg.t_end`; the last step is
/// shortened to land on `t_end`.
pub fn integrate(h: &HamiltonianData, s0: &PhaseState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let field = CompiledField::new(h)?;
    integrate_compiled(&field, s0, cfg)
}

pub fn integrate_compiled(field: &CompiledField, s0: &PhaseState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate(s0.t)?;
    if s0.q.len() != field.dim() || s0.p.len() != field.dim() {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: field.dim(),
            found: s0.q.len(),
        });
    }
    if !s0.is_finite() {
        return Err(Error::Divergence {
            t: s0.t,
            last_good: Box::new(s0.clone()),
        });
    }
    let span = cfg.t_end - s0.t;
    let full = ((span / cfg.h) * (1.0 + 1e-12)).floor() as u64;
    let mut samples = vec![s0.clone()];
    let mut cur = s0.clone();
    let mut k = 0u64;
    loop {
        let t_k = s0.t + k as f64 * cfg.h;
        let remaining = cfg.t_end - t_k;
        if remaining <= cfg.h * 1e-9 {
            break;
        }
        let h = if k < full { cfg.h } else { remaining };
        let mut next = step(field, cfg.method, &cur, h);
        k += 1;
        next.t = if k <= full { s0.t + k as f64 * cfg.h } else { cfg.t_end };
        if !next.is_finite() {
            return Err(Error::Divergence {
                t: next.t,
                last_good: Box::new(cur),
            });
        }
        if cfg.dense {
            samples.push(next.clone());
        }
        cur = next;
        if k > full {
            break;
        }
    }
    if !cfg.dense {
        samples.push(cur);
    }
    Ok(Trajectory {
        samples,
        h: cfg.h,
        method: cfg.method,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualSample {
    pub t: f64,
    pub residual: Vec<f64>,
}

struct CompiledLagrangian {
    a: Vec<Vec<f64>>,
    /// `∂_i b_j` as `db[i][j]`.
    db: Vec<Vec<CompiledPoly>>,
    dtb: Vec<CompiledPoly>,
    dc: Vec<CompiledPoly>,
}

impl CompiledLagrangian {
    fn new(l: &QuadraticLagrangian) -> Result<Self> {
        if l.n() != 1 {
            return Err(Error::Unsupported("Euler–Lagrange residuals need n = 1".into()));
        }
        let table = l.table();
        let m = l.m();
        let qi = |i: usize| table.position(i).expect("q");
        let t = table.time().expect("t");
        Ok(Self {
            a: l.a().to_f64(),
            db: (0..m)
                .map(|i| l.b().iter().map(|b| CompiledPoly::new(&b.partial(qi(i)))).collect())
                .collect(),
            dtb: l.b().iter().map(|b| CompiledPoly::new(&b.partial(t))).collect(),
            dc: (0..m).map(|i| CompiledPoly::new(&l.c().partial(qi(i)))).collect(),
        })
    }
}

/// Finite-difference weights for derivatives `0..=2` at `x0` over `nodes`.
fn fornberg_weights(x0: f64, nodes: &[f64]) -> [Vec<f64>; 3] {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; 3];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            for k in (0..=i.min(2)).rev() {
                let lower = if k > 0 { c[k - 1][j] } else { 0.0 };
                if j == i - 1 {
                    let prev = if k > 0 { c[k - 1][i - 1] } else { 0.0 };
                    c[k][i] = c1 * (k as f64 * prev - c5 * c[k][i - 1]) / c2;
                }
                c[k][j] = (c4 * c[k][j] - k as f64 * lower) / c3;
            }
        }
        c1 = c2;
    }
    [c[0].clone(), c[1].clone(), c[2].clone()]
}

/// `∂_iℒ − d/dt ∂ℒ/∂q̇^i` along the stored positions, at interior samples,
/// with five-point differences over the nearest samples.
pub fn el_residual(l: &QuadraticLagrangian, traj: &Trajectory) -> Result<Vec<ResidualSample>> {
    let n = traj.samples.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let cl = CompiledLagrangian::new(l)?;
    let m = l.m();
    let mut out = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let s1 = &traj.samples[k];
        let lo = k.saturating_sub(2).min(n.saturating_sub(5));
        let window = &traj.samples[lo..(lo + 5).min(n)];
        let nodes: Vec<f64> = window.iter().map(|s| s.t).collect();
        let [_, w1, w2] = fornberg_weights(s1.t, &nodes);
        let diff = |w: &[f64], i: usize| -> f64 { window.iter().zip(w).map(|(s, c)| c * s.q[i]).sum() };
        let qd: Vec<f64> = (0..m).map(|i| diff(&w1, i)).collect();
        let qdd: Vec<f64> = (0..m).map(|i| diff(&w2, i)).collect();
        let mut x = vec![s1.t];
        x.extend_from_slice(&s1.q);
        x.extend(std::iter::repeat_n(0.0, m));
        let residual = (0..m)
            .map(|i| {
                let force: f64 = (0..m).map(|j| cl.db[i][j].eval(&x) * qd[j]).sum::<f64>() + cl.dc[i].eval(&x);
                let aqdd: f64 = (0..m).map(|j| cl.a[i][j] * qdd[j]).sum();
                let db_dt: f64 = cl.dtb[i].eval(&x) + (0..m).map(|j| cl.db[j][i].eval(&x) * qd[j]).sum::<f64>();
                force - aqdd - db_dt
            })
            .collect();
        out.push(ResidualSample { t: s1.t, residual });
    }
    Ok(out)
}

/// `∂_t f + {ℋ, f}_V` at `s`. The polynomial is computed both directly and as
/// `{ℋ*, f}_T` on the extended table; the two must coincide.
pub fn evolution_bracket(h: &HamiltonianData, f: &Polynomial, s: &PhaseState) -> Result<f64> {
    let g = evolution_polynomial(h, f)?;
    Ok(to_f64(&g.evaluate(&s.exact_point()?)))
}

pub fn evolution_polynomial(h: &HamiltonianData, f: &Polynomial) -> Result<Polynomial> {
    let f = f.embed(h.table())?;
    let t = h.table().time().expect("t");
    let direct = &f.partial(t) + &poisson(BracketKind::V, &h.h, &f)?;
    let extended = evolution(h, &f)?;
    if direct != extended {
        return Err(Error::InvalidConfig(format!(
            "evolution bracket mismatch: {direct} vs {extended}"
        )));
    }
    Ok(direct)
}

/// `max_t |ℋ(s(t)) − ℋ(s₀)|`.
pub fn energy_drift(h: &HamiltonianData, traj: &Trajectory) -> f64 {
    let e = CompiledPoly::new(&h.h);
    let e0 = e.eval(&traj.samples[0].point());
    traj.samples
        .iter()
        .map(|s| (e.eval(&s.point()) - e0).abs())
        .fold(0.0, f64::max)
}

/// `‖R·p‖∞`.
pub fn constraint_norm(pr: &Projectors, p: &[f64]) -> f64 {
    pr.r.mul_vec_f64(p).into_iter().map(f64::abs).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub check: String,
    pub passed: bool,
    pub max_el_residual: Option<f64>,
    pub max_constraint_drift: Option<f64>,
    pub checks: Vec<Check>,
    /// Quantities reported without a pass criterion.
    pub info: BTreeMap<String, f64>,
}

impl TheoremReport {
    fn new(check: &str, checks: Vec<Check>) -> Self {
        Self {
            check: check.into(),
            passed: checks.iter().all(|c| c.passed),
            max_el_residual: None,
            max_constraint_drift: None,
            checks,
            info: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    pub constraint_drift: f64,
    pub el_residual: f64,
    pub gauge: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            constraint_drift: 1e-10,
            el_residual: 1e-4,
            gauge: 1e-8,
        }
    }
}

fn require_on_constraint(pr: &Projectors, s0: &PhaseState) -> Result<()> {
    let norm = constraint_norm(pr, &s0.p);
    if norm > 1e-12 {
        return Err(Error::OffConstraint { norm });
    }
    Ok(())
}

/// Hamilton flows started on `R·p = 0` stay there and project to
/// Euler–Lagrange solutions.
pub fn check_projected_solutions(
    l: &QuadraticLagrangian,
    h: &HamiltonianData,
    pr: &Projectors,
    s0: &PhaseState,
    cfg: &IntegratorConfig,
    tol: &Tolerances,
) -> Result<TheoremReport> {
    require_on_constraint(pr, s0)?;
    let cfg = IntegratorConfig {
        dense: true,
        ..cfg.clone()
    };
    let traj = integrate(h, s0, &cfg)?;
    let drift = traj
        .samples
        .iter()
        .map(|s| constraint_norm(pr, &s.p))
        .fold(0.0, f64::max);
    let el = el_residual(l, &traj)?
        .iter()
        .flat_map(|r| r.residual.iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    let mut rep = TheoremReport::new(
        "projected_solutions",
        vec![
            Check::at_most("constraint_drift", drift, tol.constraint_drift),
            Check::at_most("el_residual", el, tol.el_residual),
        ],
    );
    rep.max_el_residual = Some(el);
    rep.max_constraint_drift = Some(drift);
    Ok(rep)
}

/// Flows of two Hamiltonian forms differing in the kernel connection agree on
/// `P·p`, on `σ₀a·q` and on the velocity part `F`; only the kernel part of `q`
/// may differ.
#[allow(clippy::too_many_arguments)]
pub fn check_gauge_independence(
    l: &QuadraticLagrangian,
    s: &SigmaSplitting,
    pr: &Projectors,
    h1: &HamiltonianData,
    h2: &HamiltonianData,
    s0: &PhaseState,
    cfg: &IntegratorConfig,
    tol: &Tolerances,
) -> Result<TheoremReport> {
    require_on_constraint(pr, s0)?;
    let cfg = IntegratorConfig {
        dense: true,
        ..cfg.clone()
    };
    let t1 = integrate(h1, s0, &cfg)?;
    let t2 = integrate(h2, s0, &cfg)?;
    let reg = (&s.sigma0 * l.a()).to_f64();
    let sigma = s.sigma().to_f64();
    let a = l.a().to_f64();
    let f1 = CompiledField::new(h1)?;
    let f2 = CompiledField::new(h2)?;
    let cl_b: Vec<CompiledPoly> = l.b().iter().map(CompiledPoly::new).collect();
    let matvec = |mat: &[Vec<f64>], v: &[f64]| -> Vec<f64> {
        mat.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
    };
    let f_part = |field: &CompiledField, st: &PhaseState| -> Vec<f64> {
        let x = st.point();
        let (qd, _) = field.eval(&x);
        let mut lp = matvec(&a, &qd);
        for (i, b) in cl_b.iter().enumerate() {
            lp[i] += b.eval(&x);
        }
        matvec(&sigma, &lp)
    };
    let maxdiff = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let (mut dp, mut dq, mut df, mut dk) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (a1, a2) in t1.samples.iter().zip(&t2.samples) {
        dp = dp.max(maxdiff(&pr.p.mul_vec_f64(&a1.p), &pr.p.mul_vec_f64(&a2.p)));
        dq = dq.max(maxdiff(&matvec(&reg, &a1.q), &matvec(&reg, &a2.q)));
        df = df.max(maxdiff(&f_part(&f1, a1), &f_part(&f2, a2)));
        dk = dk.max(maxdiff(&a1.q, &a2.q));
    }
    let mut rep = TheoremReport::new(
        "gauge_independence",
        vec![
            Check::at_most("projected_momentum", dp, tol.gauge),
            Check::at_most("regular_coordinates", dq, tol.gauge),
            Check::at_most("velocity_f_part", df, tol.gauge),
        ],
    );
    rep.info.insert("max_coordinate_difference".into(), dk);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_weights() {
        let [w0, w1, w2] = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(&w0, &[0.0, 0.0, 1.0, 0.0, 0.0]));
        assert!(close(&w1, &[1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0]));
        assert!(close(&w2, &[-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0]));
        let [_, s1, s2] = fornberg_weights(1.0, &[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(close(&s1, &[-3.0 / 12.0, -10.0 / 12.0, 18.0 / 12.0, -6.0 / 12.0, 1.0 / 12.0]));
        assert!(close(&s2, &[11.0 / 12.0, -20.0 / 12.0, 6.0 / 12.0, 4.0 / 12.0, -1.0 / 12.0]));
    }
    use crate::hamiltonian::hamiltonian_for;
    use crate::matrix::RatMatrix;
    use crate::poly::{parse_polynomial, VariableTable};
    use crate::quadratic::{compute_sigma0, projectors_of};

    fn ham(s: &str) -> HamiltonianData {
        HamiltonianData::from_polynomial(parse_polynomial(s, &VariableTable::phase_space(2)).unwrap())
    }

    fn state(t: f64, q: [f64; 2], p: [f64; 2]) -> PhaseState {
        PhaseState::new(t, q.to_vec(), p.to_vec())
    }

    #[test]
    fn vector_field_examples() {
        let (dq, dp) = hamilton_vector_field(&ham("1/2*p1^2 + 1/2*q1^2"), &state(0.0, [1.0, 0.0], [0.0, 0.0])).unwrap();
        assert_eq!((dq, dp), (vec![0.0, 0.0], vec![-1.0, 0.0]));
        let (dq, dp) = hamilton_vector_field(&ham("p1"), &state(3.0, [5.0, 1.0], [2.0, 2.0])).unwrap();
        assert_eq!((dq, dp), (vec![1.0, 0.0], vec![0.0, 0.0]));
        let (dq, dp) = hamilton_vector_field(&ham("q1*p2"), &state(0.0, [2.0, 0.0], [0.0, 3.0])).unwrap();
        assert_eq!((dq, dp), (vec![0.0, 2.0], vec![-3.0, 0.0]));
    }

    #[test]
    fn oscillator_quarter_period() {
        let h = ham("1/2*p1^2 + 1/2*q1^2");
        let cfg = IntegratorConfig::rk4(1e-3, std::f64::consts::FRAC_PI_2);
        let tr = integrate(&h, &state(0.0, [1.0, 0.0], [0.0, 0.0]), &cfg).unwrap();
        let end = tr.last();
        assert_eq!(end.t, std::f64::consts::FRAC_PI_2);
        assert!(end.q[0].abs() < 1e-6);
        assert!((end.p[0] + 1.0).abs() < 1e-6);
        let times: Vec<f64> = tr.samples.iter().map(|s| s.t).collect();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn free_drift_and_spectator() {
        let tr = integrate(&ham("p1"), &state(0.0, [0.0, 0.0], [1.0, 0.0]), &IntegratorConfig::rk4(1e-2, 1.0)).unwrap();
        assert!((tr.last().q[0] - 1.0).abs() < 1e-12);
        let tr = integrate(
            &ham("1/2*p1^2 + 1/2*q1^2"),
            &state(0.0, [1.0, 0.0], [0.0, 1.0]),
            &IntegratorConfig::rk4(1e-2, 2.0),
        )
        .unwrap();
        assert!(tr.samples.iter().all(|s| s.p[1] == 1.0));
    }

    #[test]
    fn sparse_output_and_midpoint() {
        let cfg = IntegratorConfig {
            method: Method::Midpoint,
            h: 1e-3,
            t_end: 1.0,
            dense: false,
        };
        let tr = integrate(&ham("1/2*p1^2 + 1/2*q1^2"), &state(0.0, [1.0, 0.0], [0.0, 0.0]), &cfg).unwrap();
        assert_eq!(tr.samples.len(), 2);
        assert!((tr.last().q[0] - 1f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn divergence_is_reported() {
        let h = ham("-1/3*q1^3 + 1/2*p1^2");
        let err = integrate(&h, &state(0.0, [10.0, 0.0], [0.0, 0.0]), &IntegratorConfig::rk4(0.1, 100.0)).unwrap_err();
        match err {
            Error::Divergence { last_good, .. } => assert!(last_good.is_finite()),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn bad_configs() {
        let h = ham("p1");
        let s0 = state(0.0, [0.0, 0.0], [0.0, 0.0]);
        assert!(integrate(&h, &s0, &IntegratorConfig::rk4(0.0, 1.0)).is_err());
        assert!(integrate(&h, &s0, &IntegratorConfig::rk4(0.1, -1.0)).is_err());
    }

    fn oscillator() -> QuadraticLagrangian {
        let t = VariableTable::phase_space(2);
        QuadraticLagrangian::mechanics(
            RatMatrix::from_i64(&[&[1, 0], &[0, 0]]),
            vec![Polynomial::zero(&t), Polynomial::zero(&t)],
            parse_polynomial("-1/2*q1^2", &t).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn residual_examples() {
        let l = oscillator();
        let exact = Trajectory {
            samples: (0..200)
                .map(|k| {
                    let t = k as f64 * 1e-2;
                    state(t, [t.cos(), 0.0], [-t.sin(), 0.0])
                })
                .collect(),
            h: 1e-2,
            method: Method::Rk4,
        };
        let r = el_residual(&l, &exact).unwrap();
        assert!(r.iter().all(|s| s.residual[0].abs() < 1e-4 && s.residual[1] == 0.0));
        let still = Trajectory {
            samples: (0..5).map(|k| state(k as f64, [1.0, 0.0], [0.0, 0.0])).collect(),
            h: 1.0,
            method: Method::Rk4,
        };
        let r = el_residual(&l, &still).unwrap();
        assert!(r.iter().all(|s| (s.residual[0] + 1.0).abs() < 1e-12));
        let short = Trajectory {
            samples: still.samples[..2].to_vec(),
            h: 1.0,
            method: Method::Rk4,
        };
        assert!(matches!(el_residual(&l, &short), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn evolution_examples() {
        let t = VariableTable::phase_space(2);
        let q1 = parse_polynomial("q1", &t).unwrap();
        let s = state(0.5, [1.0, 2.0], [2.0, 0.0]);
        assert_eq!(evolution_bracket(&ham("1/2*p1^2"), &q1, &s).unwrap(), 2.0);
        let osc = ham("1/2*p1^2 + 1/2*q1^2");
        assert_eq!(evolution_bracket(&osc, &osc.h, &s).unwrap(), 0.0);
        let tt = parse_polynomial("t", &t).unwrap();
        assert_eq!(evolution_bracket(&osc, &tt, &s).unwrap(), 1.0);
    }

    #[test]
    fn projected_solutions_examples() {
        let l = oscillator();
        let s = compute_sigma0(l.a()).unwrap();
        let pr = projectors_of(&s);
        let h = hamiltonian_for(&l, &s, None).unwrap();
        let cfg = IntegratorConfig::rk4(1e-3, 2.0);
        let rep = check_projected_solutions(&l, &h, &pr, &state(0.0, [1.0, 0.0], [0.0, 0.0]), &cfg, &Tolerances::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        let off = check_projected_solutions(&l, &h, &pr, &state(0.0, [1.0, 0.0], [0.0, 1.0]), &cfg, &Tolerances::default());
        assert!(matches!(off, Err(Error::OffConstraint { .. })));
    }

    #[test]
    fn gauge_examples() {
        let l = oscillator();
        let s = compute_sigma0(l.a()).unwrap();
        let pr = projectors_of(&s);
        let t = l.table().clone();
        let phi = [Polynomial::zero(&t), Polynomial::var_named(&t, "q1").unwrap()];
        let h1 = hamiltonian_for(&l, &s, None).unwrap();
        let h2 = hamiltonian_for(&l, &s, Some(&phi)).unwrap();
        let cfg = IntegratorConfig::rk4(1e-3, 5.0);
        let s0 = state(0.0, [1.0, 0.0], [0.0, 0.0]);
        let rep = check_gauge_independence(&l, &s, &pr, &h1, &h2, &s0, &cfg, &Tolerances::default()).unwrap();
        assert!(rep.passed);
        assert!(rep.info["max_coordinate_difference"] > 1e-3);
        let same = check_gauge_independence(&l, &s, &pr, &h1, &h1, &s0, &cfg, &Tolerances::default()).unwrap();
        assert_eq!(same.info["max_coordinate_difference"], 0.0);
    }
}
