//! JSON model files.
//!
//! ```json
//! {
//!   "name": "oscillator",
//!   "m": 2,
//!   "a": [["1", "0"], ["0", "0"]],
//!   "b": ["0", "0"],
//!   "c": "-1/2*q1^2",
//!   "integrator": {"method": "rk4", "h": 0.001, "t_end": 10.0},
//!   "initial_state": {"q": [1.0, 0.0], "p": [0.0, 0.0]},
//!   "truncation": {"D": 4, "R_max": 4}
//! }
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constraints::normalize;
use crate::dynamics::{IntegratorConfig, Method, PhaseState};
use crate::error::{Error, Result};
use crate::hamiltonian::{hamiltonian_for, HamiltonianData};
use crate::matrix::RatMatrix;
use crate::poly::{parse_polynomial, Polynomial, VariableTable};
use crate::quadratic::{
    compute_sigma0, mat_poly_vec, momentum_vector, projectors_of, Projectors, QuadraticLagrangian,
    SigmaSplitting,
};

fn default_n() -> usize {
    1
}

fn default_c() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default = "IntegratorSpec::default_method")]
    pub method: Method,
    #[serde(default = "IntegratorSpec::default_h")]
    pub h: f64,
    #[serde(default = "IntegratorSpec::default_t_end")]
    pub t_end: f64,
}

impl IntegratorSpec {
    fn default_method() -> Method {
        Method::Rk4
    }
    fn default_h() -> f64 {
        1e-3
    }
    fn default_t_end() -> f64 {
        10.0
    }
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self {
            method: Self::default_method(),
            h: Self::default_h(),
            t_end: Self::default_t_end(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    #[serde(rename = "D", alias = "degree", default = "Truncation::default_degree")]
    pub degree: u32,
    #[serde(rename = "R_max", alias = "r_max", default = "Truncation::default_r_max")]
    pub r_max: u32,
}

impl Truncation {
    fn default_degree() -> u32 {
        4
    }
    fn default_r_max() -> u32 {
        4
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            degree: Self::default_degree(),
            r_max: Self::default_r_max(),
        }
    }
}

/// The document as written, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub name: String,
    #[serde(default = "default_n")]
    pub n: usize,
    pub m: usize,
    pub a: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    #[serde(default = "default_c")]
    pub c: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_offset: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_constraints: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian_override: Option<String>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub truncation: Truncation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelWarning {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residual: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub corrected_b: Vec<String>,
}

/// A validated model.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub name: String,
    pub lagrangian: QuadraticLagrangian,
    pub splitting: SigmaSplitting,
    pub projectors: Projectors,
    /// `b` with the zero-section residual removed, when one was found.
    pub corrected_b: Option<Vec<Polynomial>>,
    pub gamma_offset: Option<Vec<Polynomial>>,
    pub primary_constraints: Vec<Polynomial>,
    pub hamiltonian_override: Option<Polynomial>,
    pub integrator: IntegratorConfig,
    pub initial_state: Option<PhaseState>,
    pub truncation: Truncation,
    pub warnings: Vec<ModelWarning>,
}

fn model_err(path: impl Into<String>, e: impl std::fmt::Display) -> Error {
    Error::Model {
        path: path.into(),
        message: e.to_string(),
    }
}

fn poly_at(text: &str, table: &Arc<VariableTable>, path: String) -> Result<Polynomial> {
    parse_polynomial(text, table).map_err(|e| model_err(path, e))
}

fn poly_vec(texts: &[String], table: &Arc<VariableTable>, field: &str, len: usize) -> Result<Vec<Polynomial>> {
    if texts.len() != len {
        return Err(model_err(field, format!("expected {len} entries, found {}", texts.len())));
    }
    texts
        .iter()
        .enumerate()
        .map(|(i, s)| poly_at(s, table, format!("{field}[{i}]")))
        .collect()
}

fn matrix_at(rows: &[Vec<String>], field: &str, dim: usize) -> Result<RatMatrix> {
    let mat = RatMatrix::parse(rows).map_err(|e| model_err(field, e))?;
    if mat.rows() != dim || mat.cols() != dim {
        return Err(model_err(
            field,
            format!("expected a {dim}×{dim} matrix, found {}×{}", mat.rows(), mat.cols()),
        ));
    }
    Ok(mat)
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<ModelFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawModel = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        model_err(path, e.into_inner())
    })?;
    validate(raw)
}

/// Validates an already deserialized document.
pub fn validate(raw: RawModel) -> Result<ModelFile> {
    if raw.m == 0 || raw.n == 0 {
        return Err(model_err("m", "n and m must be positive"));
    }
    let dim = raw.n * raw.m;
    let table = if raw.n == 1 {
        VariableTable::phase_space(raw.m)
    } else {
        VariableTable::composite(raw.n, raw.m)
    };
    let a = matrix_at(&raw.a, "a", dim)?;
    a.check_symmetric().map_err(|e| model_err("a", e))?;
    let b = match &raw.b {
        Some(b) => poly_vec(b, &table, "b", dim)?,
        None => vec![Polynomial::zero(&table); dim],
    };
    let c = poly_at(&raw.c, &table, "c".into())?;
    let lagrangian = QuadraticLagrangian::new(raw.n, raw.m, a.clone(), b.clone(), c).map_err(|e| model_err("b", e))?;
    let mut splitting = compute_sigma0(&a).map_err(|e| model_err("a", e))?;
    if let Some(s1) = &raw.sigma1 {
        let s1 = matrix_at(s1, "sigma1", dim)?;
        splitting = splitting.attach_sigma1(s1).map_err(|e| model_err("sigma1", e))?;
    }
    let projectors = projectors_of(&splitting);

    let mut warnings = Vec::new();
    let residual = mat_poly_vec(&projectors.r, &b);
    let corrected_b = if residual.iter().any(|r| !r.is_zero()) {
        let corrected: Vec<Polynomial> = b.iter().zip(&residual).map(|(x, r)| x - r).collect();
        warnings.push(ModelWarning {
            kind: "zero_section".into(),
            message: "R·b ≠ 0: b is not of zero-section type; the corrected b = P·b is used".into(),
            residual: residual.iter().map(ToString::to_string).collect(),
            corrected_b: corrected.iter().map(ToString::to_string).collect(),
        });
        Some(corrected)
    } else {
        None
    };

    let gamma_offset = raw
        .gamma_offset
        .as_ref()
        .map(|g| poly_vec(g, &table, "gamma_offset", dim))
        .transpose()?;

    let primary_constraints = match &raw.primary_constraints {
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(i, s)| poly_at(s, &table, format!("primary_constraints[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        None => {
            let mut out: Vec<Polynomial> = Vec::new();
            for f in mat_poly_vec(&projectors.r, &momentum_vector(&table)) {
                let f = normalize(&f);
                if !f.is_zero() && !out.contains(&f) {
                    out.push(f);
                }
            }
            out
        }
    };

    let hamiltonian_override = raw
        .hamiltonian_override
        .as_ref()
        .map(|s| poly_at(s, &table, "hamiltonian_override".into()))
        .transpose()?;

    let spec = &raw.integrator;
    let integrator = IntegratorConfig {
        method: spec.method,
        h: spec.h,
        t_end: spec.t_end,
        dense: true,
    };
    if !(spec.h.is_finite() && spec.h > 0.0) {
        return Err(model_err("integrator.h", "step must be positive"));
    }
    if !spec.t_end.is_finite() {
        return Err(model_err("integrator.t_end", "must be finite"));
    }

    let initial_state = match &raw.initial_state {
        Some(s) => {
            if s.q.len() != raw.m || s.p.len() != dim {
                return Err(model_err(
                    "initial_state",
                    format!("expected {} positions and {dim} momenta", raw.m),
                ));
            }
            Some(PhaseState::new(s.t, s.q.clone(), s.p.clone()))
        }
        None => None,
    };
    if raw.truncation.r_max == 0 {
        return Err(model_err("truncation.R_max", "must be at least 1"));
    }

    Ok(ModelFile {
        name: raw.name,
        lagrangian,
        splitting,
        projectors,
        corrected_b,
        gamma_offset,
        primary_constraints,
        hamiltonian_override,
        integrator,
        initial_state,
        truncation: raw.truncation,
        warnings,
    })
}

impl ModelFile {
    pub fn table(&self) -> &Arc<VariableTable> {
        self.lagrangian.table()
    }

    pub fn m(&self) -> usize {
        self.lagrangian.m()
    }

    pub fn n(&self) -> usize {
        self.lagrangian.n()
    }

    /// The Lagrangian with the corrected `b` when the zero-section condition failed.
    pub fn effective_lagrangian(&self) -> Result<QuadraticLagrangian> {
        match &self.corrected_b {
            Some(b) => self.lagrangian.with_b(b.clone()),
            None => Ok(self.lagrangian.clone()),
        }
    }

    /// The override when given, otherwise the form built from `σ₀ + σ₁` and `φ`.
    pub fn hamiltonian(&self) -> Result<HamiltonianData> {
        if let Some(h) = &self.hamiltonian_override {
            return Ok(HamiltonianData::from_polynomial(h.clone()));
        }
        let l = self.effective_lagrangian()?;
        hamiltonian_for(&l, &self.splitting, self.gamma_offset.as_deref())
    }

    /// Re-emits the model with normalised polynomial and rational text.
    pub fn to_raw(&self) -> RawModel {
        let strs = |v: &[Polynomial]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        let l = &self.lagrangian;
        RawModel {
            name: self.name.clone(),
            n: l.n(),
            m: l.m(),
            a: l.a().string_rows(),
            b: Some(strs(l.b())),
            c: l.c().to_string(),
            sigma1: (!self.splitting.sigma1.is_zero()).then(|| self.splitting.sigma1.string_rows()),
            gamma_offset: self.gamma_offset.as_deref().map(strs),
            primary_constraints: Some(strs(&self.primary_constraints)),
            hamiltonian_override: self.hamiltonian_override.as_ref().map(ToString::to_string),
            integrator: IntegratorSpec {
                method: self.integrator.method,
                h: self.integrator.h,
                t_end: self.integrator.t_end,
            },
            initial_state: self.initial_state.as_ref().map(|s| InitialState {
                t: s.t,
                q: s.q.clone(),
                p: s.p.clone(),
            }),
            truncation: self.truncation,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("model serialises")
    }

    /// Semantic equality: polynomials and matrices compared as objects.
    pub fn same_as(&self, other: &ModelFile) -> bool {
        self.name == other.name
            && self.lagrangian == other.lagrangian
            && self.splitting == other.splitting
            && self.gamma_offset == other.gamma_offset
            && self.primary_constraints == other.primary_constraints
            && self.hamiltonian_override == other.hamiltonian_override
            && self.integrator == other.integrator
            && self.initial_state == other.initial_state
            && self.truncation == other.truncation
    }
}
