//! Sparse exact polynomials over named phase-space variables, and the graded
//! commutative algebra built on top of them.

pub mod graded;
mod parse;
mod polynomial;
mod table;

pub use parse::parse_polynomial;
pub use polynomial::{graded_cmp, monomials_of_degree, monomials_up_to, poly_arith, ArithOp, Monomial, Poly, Polynomial};
pub use table::{VarRole, Variable, VariableTable};
