//! Spectral data of the expansion map and the algebra built on it.

pub mod eigen;
pub mod integer;
pub mod jordan;
pub mod pisot;
pub mod separation;

pub use eigen::{char_poly, factor_charpoly, spectral_data, Eigenvalue, SpectralData};
pub use integer::{algebraic_integer_check, IntegerCheck, IntegerCheckFailure};
pub use jordan::{jordan_expansion, JordanExpansion};
pub use pisot::{pisot_family_check, PisotFamilyVerdict, PisotVerdict};
pub use separation::{separation_bound, SeparationCertificate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("precision: {0}")]
    Precision(String),
    #[error("not Pisot: {0}")]
    NotPisot(String),
    #[error("rank: {0}")]
    Rank(String),
    #[error("shape: {0}")]
    Shape(String),
    #[error("numeric: {0}")]
    Numeric(String),
}
