//! Finite-window diagnostics on point sets.

pub mod flc;
pub mod gap;
pub mod neighbors;
pub mod representability;
pub mod supports;
pub mod ucf;

pub use flc::{delone_constants, flc_check, DeloneConstants, FlcReport, FlcVerdict};
pub use gap::{meyer_gap_curve, GapCurve, MeyerVerdict};
pub use representability::{representability_check, Representability};
pub use supports::{interval_hulls, solve_adjoint_supports, SupportApproximation};
pub use ucf::{ucf_estimate, UcfEstimate};

use crate::substitution::SubstitutionError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GeometryError {
    #[error("window {window} is too small: need at least {needed}")]
    WindowTooSmall { window: f64, needed: f64 },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}
