use thiserror::Error;

use crate::dynamics::PhaseState;
use crate::poly::Polynomial;

/// Syntax error in polynomial or rational text, with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at offset {offset})")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
}

impl ParseError {
    pub fn new(message: impl Into<String>, offset: usize) -> Self {
        Self {
            message: message.into(),
            offset,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("operands live over different variable tables")]
    TableMismatch,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("a·σ₁ ≠ 0: σ₁ does not take values in Ker a")]
    KernelCondition,

    #[error("zero-section condition R·b = 0 fails; residual r = [{}]", join(residual))]
    ZeroSectionViolation {
        residual: Vec<Polynomial>,
        corrected_b: Vec<Polynomial>,
    },

    #[error("soldering offset violates {0}")]
    SolderingViolation(&'static str),

    #[error("splitting was not computed from this Lagrangian's kinetic matrix")]
    ProvenanceMismatch,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("integration diverged at t = {t}")]
    Divergence { t: f64, last_good: Box<PhaseState> },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("initial state is off the Lagrangian constraint space (|R·p|∞ = {norm})")]
    OffConstraint { norm: f64 },

    #[error("degree {degree} exceeds truncation degree {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },

    #[error("vector field is not projectable: {0}")]
    NotProjectable(String),

    #[error("antighost number {k} outside the certified window (R_max = {r_max})")]
    Truncation { k: u32, r_max: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("graded parity inconsistency: {0}")]
    Parity(String),

    #[error("model error at `{path}`: {message}")]
    Model { path: String, message: String },
}

fn join(polys: &[Polynomial]) -> String {
    polys
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
