//! Substitution Delone multisets: configuration, the matrix function system,
//! patch generation, generating clusters and legality.

pub mod config;
pub mod generating;
pub mod legality;
pub mod patch;
pub mod system;
pub mod validate;

pub use config::{Lit, SystemConfig, ThetaConfig};
pub use generating::{
    default_generating, find_generating, generate_patch, generate_patch_from, Generator, GeneratingCluster,
    GeneratingMode,
};
pub use legality::{is_legal, Legality};
pub use patch::{ColoredPointSet, Embedding, IntMfs, Point};
pub use system::{default_l_max, Primitivity, SubstitutionMatrix, SubstitutionSystem};
pub use validate::{iterate_phi, validate_system, ValidationReport};

use crate::arithmetic::ArithmeticError;
use crate::spectral::SpectralError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SubstitutionError {
    #[error("invalid config field {field}: {message}")]
    Config { field: String, message: String },
    #[error("expansion map is not expansive: {0}")]
    NotExpansive(String),
    #[error("overlap in color {color} at {point}: produced by {first} and by {second}")]
    Overlap { color: String, point: String, first: String, second: String },
    #[error("no generating cluster found: {0}; run find_generating with a larger search radius or k_max")]
    NoGenerating(String),
    #[error("expansion is not integral over the power basis: {0}")]
    NotIntegral(String),
    #[error("integer overflow while {0}")]
    Overflow(String),
    #[error("{0}")]
    Inconsistent(String),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Spectral(SpectralError),
}
