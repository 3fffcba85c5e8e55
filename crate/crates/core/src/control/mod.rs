//! Tile maps, control points, the translation module and telescoping sums.

pub mod telescope;
pub mod tilemap;
pub mod xi;

pub use telescope::{telescope_decomposition, Telescope, Telescoper, Tile};
pub use tilemap::{build_tile_map, build_tile_map_with, control_offsets, tile_map_power, ControlPointAtlas, TileMap};
pub use xi::{verify_control_translation, xi_observe, ControlTranslation, XiModule};

use crate::arithmetic::ArithmeticError;
use crate::spectral::SpectralError;
use crate::substitution::SubstitutionError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ControlError {
    #[error("substitution matrix is not primitive up to power {l_max}")]
    NotPrimitive { l_max: usize },
    #[error("power {power} is below the primitivity witness {witness}")]
    PowerTooSmall { power: usize, witness: usize },
    #[error("invalid tile map: {0}")]
    InvalidChoice(String),
    #[error("singular affine system: {0}")]
    Singular(String),
    #[error("no common ancestor inside the patch: {0}; generate a larger patch")]
    NoCommonAncestor(String),
    #[error("control property violated: {0}")]
    Property(String),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}
