//! Exact arithmetic: rational polynomials, real number fields, vectors and matrices.

pub mod expr;
pub mod factor;
pub mod field;
pub mod kpoly;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod vector;

pub use field::{scalar_arith, AlgebraicScalar, Approximation, FieldSpec, NumberField, ScalarOp};
pub use matrix::{FieldMatrix, RationalMatrix};
pub use poly::Poly;
pub use vector::AlgebraicVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithmeticError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("mismatched number-field contexts: {left} vs {right}")]
    Context { left: String, right: String },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("integer overflow in {0}")]
    Overflow(String),
}
