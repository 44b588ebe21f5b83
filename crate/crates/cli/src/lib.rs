//! Command dispatch for `degha`.
//!
//! Every command reads one JSON model, runs the matching analysis and returns a
//! [`RunReport`]. Reports are deterministic apart from `wall_time_ms`.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use degha_core::constraints::{classify, dirac_algorithm, DiracStatus};
use degha_core::dynamics::{
    check_gauge_independence, check_projected_solutions, constraint_norm, energy_drift, integrate,
    IntegratorConfig, Method, PhaseState, TheoremReport, Tolerances, Trajectory,
};
use degha_core::hamiltonian::{
    check_weak_association, constrained_hamiltonian, hamiltonian_for, hamiltonian_map, Association,
};
use degha_core::koszul::{build_tower, homology, irreducible_subcomplex, nilpotency_check};
use degha_core::brst::{brst_charge, verify_brst_generates_delta};
use degha_core::model::{parse_model, ModelFile};
use degha_core::{Error, Polynomial, Rational};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Simulate,
    Dirac,
    Kt,
    Brst,
    CheckTheorems,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Analyze,
        Command::Simulate,
        Command::Dirac,
        Command::Kt,
        Command::Brst,
        Command::CheckTheorems,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Simulate => "simulate",
            Command::Dirac => "dirac",
            Command::Kt => "kt",
            Command::Brst => "brst",
            Command::CheckTheorems => "check-theorems",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Overrides for the model's integrator, truncation and tolerances.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Flags {
    pub h: Option<f64>,
    pub t_end: Option<f64>,
    pub method: Option<Method>,
    pub degree: Option<u32>,
    pub r_max: Option<u32>,
    /// Number of perturbed initial states integrated in parallel.
    pub sweep: Option<usize>,
    pub constraint_tol: Option<f64>,
    pub el_tol: Option<f64>,
    pub gauge_tol: Option<f64>,
}

impl Flags {
    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            constraint_drift: self.constraint_tol.unwrap_or(d.constraint_drift),
            el_residual: self.el_tol.unwrap_or(d.el_residual),
            gauge: self.gauge_tol.unwrap_or(d.gauge),
        }
    }

    fn integrator(&self, model: &ModelFile) -> IntegratorConfig {
        let base = &model.integrator;
        IntegratorConfig {
            method: self.method.unwrap_or(base.method),
            h: self.h.unwrap_or(base.h),
            t_end: self.t_end.unwrap_or(base.t_end),
            dense: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub model: String,
    /// SHA-256 of the model text and the effective flags.
    pub input_digest: String,
    pub passed: bool,
    pub warnings: Vec<Value>,
    pub results: Value,
    pub wall_time_ms: f64,
}

impl RunReport {
    /// The report with the timing field zeroed, for comparisons.
    pub fn normalized(&self) -> Self {
        Self {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    /// `t,q1..qm,p1..pm,constraint_norm` rows for `simulate`.
    pub trajectory_csv: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// Bad model text, flags or file access. Exit code 2.
    Input,
    /// The computation itself failed. Exit code 1.
    Check,
}

#[derive(Debug)]
pub struct RunError {
    pub kind: FailureKind,
    pub message: String,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for RunError {}

impl RunError {
    fn from_core(command: Command, e: Error) -> Self {
        let kind = match e {
            Error::Model { .. }
            | Error::Parse(_)
            | Error::UnknownVariable(_)
            | Error::DimensionMismatch { .. }
            | Error::NotSymmetric { .. }
            | Error::InvalidConfig(_)
            | Error::Unsupported(_)
            | Error::OffConstraint { .. }
            | Error::Truncation { .. }
            | Error::KernelCondition
            | Error::SolderingViolation(_) => FailureKind::Input,
            _ => FailureKind::Check,
        };
        Self {
            kind,
            message: format!("{command}: {e}"),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Input => 2,
            FailureKind::Check => 1,
        }
    }
}

fn digest(text: &str, command: Command, flags: &Flags) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hasher.update(command.id().as_bytes());
    hasher.update(serde_json::to_vec(flags).expect("flags serialise"));
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn strs(v: &[Polynomial]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Parses `model_text` and runs `command`.
pub fn run(command: Command, model_text: &str, flags: &Flags) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let model = parse_model(model_text).map_err(|e| RunError::from_core(command, e))?;
    let ctx = |e: Error| RunError::from_core(command, e);
    let (passed, results, csv) = match command {
        Command::Analyze => analyze(&model).map(|(p, r)| (p, r, None)),
        Command::Simulate => simulate(&model, flags),
        Command::Dirac => dirac(&model, flags).map(|(p, r)| (p, r, None)),
        Command::Kt => kt(&model, flags).map(|(p, r)| (p, r, None)),
        Command::Brst => brst(&model, flags).map(|(p, r)| (p, r, None)),
        Command::CheckTheorems => check_theorems(&model, flags).map(|(p, r)| (p, r, None)),
    }
    .map_err(ctx)?;
    let report = RunReport {
        command: command.id().into(),
        model: model.name.clone(),
        input_digest: digest(model_text, command, flags),
        passed,
        warnings: model
            .warnings
            .iter()
            .map(|w| serde_json::to_value(w).expect("warning serialises"))
            .collect(),
        results,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(Outcome {
        report,
        trajectory_csv: csv,
    })
}

/// Exact on-constraint sample points `(t, q, P·p)` for association checks.
fn association_samples(model: &ModelFile) -> Vec<Vec<Rational>> {
    let m = model.m();
    let dim = model.lagrangian.dim();
    (0..8i64)
        .map(|k| {
            let small = |j: i64| Rational::new(((k * 7 + j * 3) % 5 - 2).into(), ((j % 3) + 1).into());
            let q: Vec<Rational> = (0..m as i64).map(|j| small(j + 1)).collect();
            let raw: Vec<Rational> = (0..dim as i64).map(|j| small(j + 11)).collect();
            let p = model.projectors.p.mul_vec(&raw).expect("square projector");
            let mut pt = vec![Rational::new(k.into(), 2.into())];
            pt.extend(q);
            pt.extend(p);
            pt
        })
        .collect()
}

fn analyze(model: &ModelFile) -> degha_core::Result<(bool, Value)> {
    let s = &model.splitting;
    let pr = &model.projectors;
    let h = model.hamiltonian()?;
    let mut out = json!({
        "rank": s.rank,
        "sigma0": s.sigma0,
        "sigma1": s.sigma1,
        "P": pr.p,
        "R": pr.r,
        "projector_identities": pr.identities_hold(),
        "primary_constraints": strs(&model.primary_constraints),
        "hamiltonian": h.h.to_string(),
        "hamiltonian_map": strs(&hamiltonian_map(&h)),
    });
    let mut passed = pr.identities_hold();
    if let Some(prov) = &h.provenance {
        out["gamma"] = json!(strs(&prov.connection.gamma));
        out["c_prime"] = json!(prov.c_prime.to_string());
        out["constrained_hamiltonian"] = json!(constrained_hamiltonian(&h, pr)?.to_string());
        if model.n() == 1 {
            let l = model.effective_lagrangian()?;
            let rep = check_weak_association(&h, &l, s, &association_samples(model))?;
            passed &= rep.association != Association::None;
            out["association"] = serde_json::to_value(rep.association).expect("serialises");
            out["association_report"] = serde_json::to_value(&rep).expect("serialises");
        }
    } else {
        out["association"] = json!("none");
        out["note"] = json!("hamiltonian_override has no generating Lagrangian");
    }
    Ok((passed, out))
}

fn require_initial(model: &ModelFile) -> degha_core::Result<PhaseState> {
    model
        .initial_state
        .clone()
        .ok_or_else(|| Error::InvalidConfig("model has no initial_state".into()))
}

fn trajectory_csv(traj: &Trajectory, model: &ModelFile) -> String {
    let m = model.m();
    let dim = model.lagrangian.dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|i| format!("q{i}")));
    header.extend((1..=dim).map(|i| format!("p{i}")));
    header.push("constraint_norm".into());
    w.write_record(&header).expect("in-memory write");
    for s in &traj.samples {
        let mut row = vec![format!("{:e}", s.t)];
        row.extend(s.q.iter().chain(&s.p).map(|x| format!("{x:e}")));
        row.push(format!("{:e}", constraint_norm(&model.projectors, &s.p)));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[derive(Serialize)]
struct SweepEntry {
    index: usize,
    initial: PhaseState,
    final_state: PhaseState,
    max_constraint_drift: f64,
    energy_drift: f64,
}

fn simulate(model: &ModelFile, flags: &Flags) -> degha_core::Result<(bool, Value, Option<String>)> {
    let h = model.hamiltonian()?;
    let s0 = require_initial(model)?;
    let cfg = flags.integrator(model);
    let tol = flags.tolerances();
    let traj = integrate(&h, &s0, &cfg)?;
    let pr = &model.projectors;
    let drift = |tr: &Trajectory| {
        let c0 = constraint_norm(pr, &tr.samples[0].p);
        tr.samples
            .iter()
            .map(|s| (constraint_norm(pr, &s.p) - c0).abs())
            .fold(0.0, f64::max)
    };
    let max_drift = drift(&traj);
    let mut out = json!({
        "method": cfg.method,
        "h": cfg.h,
        "t_end": cfg.t_end,
        "steps": traj.samples.len() - 1,
        "initial_constraint_norm": constraint_norm(pr, &s0.p),
        "max_constraint_drift": max_drift,
        "energy_drift": energy_drift(&h, &traj),
        "final_state": traj.last(),
    });
    let mut passed = max_drift <= tol.constraint_drift;
    if let Some(n) = flags.sweep.filter(|&n| n > 0) {
        // Offsets along P·e_i keep each start on the constraint surface.
        let dim = model.lagrangian.dim();
        let pmat = pr.p.to_f64();
        let starts: Vec<PhaseState> = (0..n)
            .map(|k| {
                let eps = 0.05 * (k as f64 + 1.0);
                let dir = k % dim;
                let p = s0.p.iter().enumerate().map(|(i, x)| x + eps * pmat[i][dir]).collect();
                let q = s0.q.iter().map(|x| x + eps).collect();
                PhaseState::new(s0.t, q, p)
            })
            .collect();
        let entries: Vec<SweepEntry> = starts
            .par_iter()
            .enumerate()
            .map(|(index, st)| {
                let tr = integrate(&h, st, &cfg)?;
                Ok(SweepEntry {
                    index,
                    initial: st.clone(),
                    final_state: tr.last().clone(),
                    max_constraint_drift: drift(&tr),
                    energy_drift: energy_drift(&h, &tr),
                })
            })
            .collect::<degha_core::Result<_>>()?;
        passed &= entries.iter().all(|e| e.max_constraint_drift <= tol.constraint_drift);
        out["sweep"] = serde_json::to_value(&entries).expect("serialises");
    }
    Ok((passed, out, Some(trajectory_csv(&traj, model))))
}

fn dirac(model: &ModelFile, flags: &Flags) -> degha_core::Result<(bool, Value)> {
    let h = model.hamiltonian()?;
    let degree = flags.degree.unwrap_or(model.truncation.degree);
    if model.primary_constraints.is_empty() {
        return Ok((
            true,
            json!({"status": "closed", "generations": [], "note": "no primary constraints"}),
        ));
    }
    let rep = dirac_algorithm(&h, &model.primary_constraints, degree, None)?;
    let constraints = rep.constraints();
    let class = classify(&constraints, degree)?;
    let passed = rep.status == DiracStatus::Closed;
    Ok((
        passed,
        json!({
            "dirac": rep,
            "classification": class,
        }),
    ))
}

fn kt(model: &ModelFile, flags: &Flags) -> degha_core::Result<(bool, Value)> {
    let degree = flags.degree.unwrap_or(model.truncation.degree);
    let r_max = flags.r_max.unwrap_or(model.truncation.r_max);
    let pr = &model.projectors;
    let tower = build_tower(model.m(), model.n(), r_max, false)?;
    let nil = nilpotency_check(&tower, pr, degree)?;
    let hom = homology(&tower, pr, r_max - 1, degree)?;
    let irr = irreducible_subcomplex(&tower, model.lagrangian.a(), pr, degree)?;
    let passed = nil.passed && (hom.resolves || hom.vacuous);
    Ok((
        passed,
        json!({
            "tower": tower.summary(),
            "nilpotent": nil.passed,
            "nilpotency": nil,
            "homology": hom,
            "irreducible": irr,
        }),
    ))
}

fn brst(model: &ModelFile, flags: &Flags) -> degha_core::Result<(bool, Value)> {
    let r_max = flags.r_max.unwrap_or(model.truncation.r_max);
    let pr = &model.projectors;
    let tower = build_tower(model.m(), model.n(), r_max, true)?;
    let q = brst_charge(&tower, pr)?;
    let rep = verify_brst_generates_delta(&q, &tower, pr)?;
    Ok((
        rep.passed,
        json!({
            "charge": q.q.to_string(),
            "verification": rep,
        }),
    ))
}

fn check_theorems(model: &ModelFile, flags: &Flags) -> degha_core::Result<(bool, Value)> {
    let tol = flags.tolerances();
    let cfg = flags.integrator(model);
    let l = model.effective_lagrangian()?;
    let s = &model.splitting;
    let pr = &model.projectors;
    let mut reports: Vec<TheoremReport> = Vec::new();
    let mut notes: BTreeMap<&str, String> = BTreeMap::new();
    if model.hamiltonian_override.is_some() {
        notes.insert("dynamics", "skipped: hamiltonian_override has no generating Lagrangian".into());
    } else if let Some(mut s0) = model.initial_state.clone() {
        if constraint_norm(pr, &s0.p) > 1e-12 {
            s0.p = pr.p.mul_vec_f64(&s0.p);
            notes.insert("initial_state", "momenta projected onto R·p = 0".into());
        }
        let h = hamiltonian_for(&l, s, None)?;
        if l.n() == 1 {
            reports.push(check_projected_solutions(&l, &h, pr, &s0, &cfg, &tol)?);
        }
        match &model.gamma_offset {
            Some(phi) => {
                let h2 = hamiltonian_for(&l, s, Some(phi))?;
                reports.push(check_gauge_independence(&l, s, pr, &h, &h2, &s0, &cfg, &tol)?);
            }
            None => {
                notes.insert("gauge_independence", "skipped: model has no gamma_offset".into());
            }
        }
    } else {
        notes.insert("dynamics", "skipped: model has no initial_state".into());
    }
    let a = model.lagrangian.a();
    let s0m = &s.sigma0;
    let algebraic = json!({
        "a_sigma0_a": &(a * s0m) * a == *a,
        "sigma0_a_sigma0": &(s0m * a) * s0m == *s0m,
        "a_sigma0_commute": a * s0m == s0m * a,
        "projectors": pr.identities_hold(),
    });
    let algebra_ok = algebraic.as_object().expect("object").values().all(|v| v == &json!(true));
    let passed = algebra_ok && reports.iter().all(|r| r.passed);
    Ok((
        passed,
        json!({
            "algebraic": algebraic,
            "theorems": reports,
            "notes": notes,
        }),
    ))
}
