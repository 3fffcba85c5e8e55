//! Whether `Λ + A` tiles: an exact interval sweep in dimension one, density and
//! raster sampling otherwise.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::AlgebraicScalar;
use crate::substitution::{ColoredPointSet, SubstitutionSystem};

use super::neighbors::{ball_volume, GridIndex};
use super::supports::SupportApproximation;
use super::GeometryError;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Representability {
    /// Exact: the tiles cover the checked interval without overlap.
    Tiling { checked: (f64, f64), tiles: usize },
    /// Exact: an uncovered interval `[from, to]`.
    Gap { from: String, to: String, at: f64 },
    /// Exact: two tiles share an interval `[from, to]`.
    Overlap { from: String, to: String, at: f64 },
    /// Sampled: density sum and single-cover fraction within tolerance.
    ConsistentSampled { density_sum: f64, covered_once: f64, samples: usize },
    /// Sampled: tolerance violated.
    InconsistentSampled { density_sum: f64, covered_once: f64, uncovered: f64, multiple: f64, samples: usize },
}

impl Representability {
    pub fn holds(&self) -> bool {
        matches!(self, Representability::Tiling { .. } | Representability::ConsistentSampled { .. })
    }
}

pub const DENSITY_TOLERANCE: f64 = 0.02;
pub const COVER_TOLERANCE: f64 = 0.9;

/// Checks that the translates `x + A_i`, `x ∈ Λ_i`, tile the safe part of the window.
///
/// A window of `0` means the extent of the points.
pub fn representability_check(
    sys: &SubstitutionSystem,
    points: &ColoredPointSet,
    supports: &SupportApproximation,
) -> Result<Representability, GeometryError> {
    if points.colors() != sys.colors() || supports.rasters.len() != sys.colors() {
        return Err(GeometryError::Mismatch("points, supports and system disagree on the colors".into()));
    }
    if points.is_empty() {
        return Err(GeometryError::TooFewPoints { needed: 1, got: 0 });
    }
    match &supports.intervals {
        Some(iv) if sys.dimension() == 1 => Ok(sweep_1d(points, iv)),
        _ => sampled(points, supports),
    }
}

fn sweep_1d(points: &ColoredPointSet, iv: &[(AlgebraicScalar, AlgebraicScalar)]) -> Representability {
    let emb = points.embedding();
    let mut tiles: Vec<(f64, AlgebraicScalar, AlgebraicScalar)> = Vec::new();
    for c in 0..points.colors() {
        for p in points.points(c) {
            let x = emb.scalar_of(&p.key, 0);
            let lo = &x + &iv[c].0;
            tiles.push((lo.to_f64_accurate(), lo, &x + &iv[c].1));
        }
    }
    tiles.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.exact_cmp(&b.1)));
    let longest = iv.iter().map(|(l, r)| (r - l).to_f64_accurate()).fold(0.0, f64::max);
    let first = tiles.first().expect("nonempty").0;
    let last = tiles.iter().map(|t| t.2.to_f64_accurate()).fold(f64::NEG_INFINITY, f64::max);
    let w = if points.window() > 0.0 { points.window() } else { f64::INFINITY };
    let a = (-w).max(first) + longest;
    let b = w.min(last) - longest;
    if a >= b {
        return Representability::Tiling { checked: (a, a), tiles: 0 };
    }
    let relevant: Vec<&(f64, AlgebraicScalar, AlgebraicScalar)> =
        tiles.iter().filter(|t| t.2.to_f64_accurate() >= a - 1e-9 && t.0 <= b + 1e-9).collect();
    for pair in relevant.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        match next.1.exact_cmp(&prev.2) {
            Ordering::Equal => {}
            Ordering::Greater => {
                return Representability::Gap { from: prev.2.to_string(), to: next.1.to_string(), at: prev.2.to_f64_accurate() };
            }
            Ordering::Less => {
                let to = if next.2 < prev.2 { &next.2 } else { &prev.2 };
                return Representability::Overlap { from: next.1.to_string(), to: to.to_string(), at: next.0 };
            }
        }
    }
    Representability::Tiling { checked: (a, b), tiles: relevant.len() }
}

fn sampled(points: &ColoredPointSet, supports: &SupportApproximation) -> Result<Representability, GeometryError> {
    let d = points.dim();
    let reach = supports.half_width * (d as f64).sqrt();
    let safe = points.window() - 2.0 * reach;
    if safe <= 0.0 {
        return Err(GeometryError::WindowTooSmall { window: points.window(), needed: 2.0 * reach });
    }
    let ball = ball_volume(d, safe);
    let density_sum: f64 = (0..points.colors())
        .map(|c| {
            let n = points.points(c).iter().filter(|p| p.pos.iter().map(|x| x * x).sum::<f64>() <= safe * safe).count();
            n as f64 / ball * supports.volume(c)
        })
        .sum();
    let mut tagged: Vec<(usize, Vec<f64>)> = Vec::new();
    for c in 0..points.colors() {
        tagged.extend(points.points(c).iter().map(|p| (c, p.pos.clone())));
    }
    let pos: Vec<Vec<f64>> = tagged.iter().map(|t| t.1.clone()).collect();
    let index = GridIndex::auto(&pos);
    // sample centres on a shifted grid inside the safe ball, away from rational lines
    let per_axis = (40_000f64.powf(1.0 / d as f64)).ceil() as i64;
    let step = 2.0 * safe / per_axis as f64;
    let shift = [0.318_309_886, 0.577_215_665, 0.141_421_356, 0.271_828_183];
    let total = (per_axis as usize).pow(d as u32);
    let counts: Vec<usize> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let z: Vec<f64> = (0..d)
                .map(|k| {
                    let i = (idx % per_axis as usize) as f64;
                    idx /= per_axis as usize;
                    -safe + (i + shift[k % 4]) * step
                })
                .collect();
            if z.iter().map(|x| x * x).sum::<f64>() > safe * safe {
                return None;
            }
            let hits = index
                .within(&z, reach)
                .into_iter()
                .filter(|&i| {
                    let (c, x) = &tagged[i];
                    let y: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
                    supports.raster_contains(*c, &y)
                })
                .count();
            Some(hits)
        })
        .collect();
    let samples = counts.len();
    let frac = |f: &dyn Fn(usize) -> bool| counts.iter().filter(|&&n| f(n)).count() as f64 / samples.max(1) as f64;
    let once = frac(&|n| n == 1);
    let zero = frac(&|n| n == 0);
    let many = frac(&|n| n > 1);
    Ok(if (density_sum - 1.0).abs() <= DENSITY_TOLERANCE && once >= COVER_TOLERANCE {
        Representability::ConsistentSampled { density_sum, covered_once: once, samples }
    } else {
        Representability::InconsistentSampled { density_sum, covered_once: once, uncovered: zero, multiple: many, samples }
    })
}
