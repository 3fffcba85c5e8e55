//! Finite-window diffraction, Bragg peaks, dynamical eigenvalues and the
//! four-way equivalence report.

pub mod bragg;
pub mod eigen;
pub mod equivalence;
pub mod intensity;

pub use bragg::{detect_bragg, scan_profile, BraggParams, BraggPeak, BraggSet};
pub use eigen::{
    eigenvalue_search, eigenvalue_test, search_with, Accepted, Candidate, DualModule, EigenTest, EigenvalueSet,
    SearchParams, Witness,
};
pub use equivalence::{
    equivalence_report, equivalence_report_on, EquivalenceParams, EquivalenceReport, PeakCheck, Stages, Verdict,
};
pub use intensity::{intensity, IntensityProfile};

use crate::control::ControlError;
use crate::geometry::neighbors::max_empty_ball;
use crate::geometry::GeometryError;
use crate::substitution::SubstitutionError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum DiffractionError {
    #[error("empty point list")]
    Empty,
    #[error("{0}")]
    Invalid(String),
    #[error("translation group is not closed under Q: {0}")]
    NotClosed(String),
    #[error("stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

impl DiffractionError {
    pub fn stage(stage: &'static str, e: impl std::fmt::Display) -> Self {
        DiffractionError::Stage { stage, message: e.to_string() }
    }
}

/// Largest empty-ball radius of `set` over centres in the box `[lo, hi]`.
pub fn relative_density(set: &[Vec<f64>], lo: &[f64], hi: &[f64]) -> f64 {
    let span = lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    max_empty_ball(set, lo, hi, span / 400.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_density_of_simple_sets() {
        let z: Vec<Vec<f64>> = (-10..=10).map(|i| vec![i as f64]).collect();
        assert_eq!(relative_density(&z, &[-10.0], &[10.0]), 0.5);
        assert_eq!(relative_density(&[vec![0.0]], &[-5.0], &[5.0]), 5.0);
    }
}
