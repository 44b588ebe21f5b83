//! Degenerate quadratic Lagrangians in the time-dependent Hamiltonian picture.
//!
//! The crate covers the exact linear algebra of the kinetic matrix (σ-splitting
//! and projectors), the family of Hamiltonian forms attached to a Lagrangian,
//! fixed-step Hamilton dynamics with Euler–Lagrange cross-checks, Poisson
//! brackets and the Dirac constraint algorithm, and the Koszul–Tate / BRST
//! machinery for the constraints `R·p = 0`.
//!
//! All algebraic statements are checked with exact rationals.

pub mod brst;
pub mod constraints;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod ideal;
pub mod koszul;
pub mod matrix;
pub mod model;
pub mod poly;
pub mod quadratic;
pub mod rational;

pub use error::{Error, ParseError, Result};
pub use matrix::RatMatrix;
pub use poly::graded::{
    apply_derivation, graded_mul, GeneratorKind, GeneratorUniverse, GradedDerivation,
    GradedElement, GradedMonomial, Generator,
};
pub use poly::{parse_polynomial, poly_arith, ArithOp, Poly, Polynomial, VarRole, VariableTable};
pub use quadratic::{
    compute_sigma0, kernel_connection, legendre_map, projectors, split_momentum, split_velocity,
    KernelConnection, MomentumSplit, Projectors, QuadraticLagrangian, SigmaSplitting,
    VelocitySplit,
};
pub use rational::{GaussianRational, Rational};
