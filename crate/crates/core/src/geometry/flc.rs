//! Translation classes of `R`-clusters and Delone constants on the safe interior.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::substitution::ColoredPointSet;

use super::neighbors::{max_empty_ball, min_pair_distance, GridIndex};
use super::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlcVerdict {
    /// The class count on the safe interior equals the count on its half.
    FlcConsistent,
    /// More classes appear when the region doubles.
    Growing,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlcReport {
    pub cluster_radius: f64,
    pub window: f64,
    /// Centres are taken from `|x| ≤ safe_radius`.
    pub safe_radius: f64,
    pub centers: usize,
    pub class_count: usize,
    pub centers_half: usize,
    pub class_count_half: usize,
    pub verdict: FlcVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeloneConstants {
    pub packing_radius: f64,
    pub covering_radius: f64,
    pub safe_radius: f64,
    pub points: usize,
}

/// All colored points as `(color, key, position)`.
fn colored(points: &ColoredPointSet) -> (Vec<(usize, Vec<i64>)>, Vec<Vec<f64>>) {
    let mut tagged = Vec::new();
    let mut pos = Vec::new();
    for c in 0..points.colors() {
        for p in points.points(c) {
            tagged.push((c, p.key.clone()));
            pos.push(p.pos.clone());
        }
    }
    (tagged, pos)
}

/// Largest nearest-neighbour distance of the union, a cheap bound used as a boundary margin.
fn margin(points: &ColoredPointSet) -> f64 {
    let union: Vec<Vec<f64>> = points.union().into_iter().map(|p| p.pos).collect();
    if union.len() < 2 {
        return 0.0;
    }
    let index = GridIndex::auto(&union);
    (0..union.len())
        .into_par_iter()
        .filter_map(|i| index.nearest(&union[i], Some(i)).map(|t| t.0))
        .reduce(|| 0.0, f64::max)
}

/// Counts translation classes of clusters `B_R(x) ∩ Λ`, `x ∈ supp Λ`, on the safe
/// interior and on its half.
pub fn flc_check(points: &ColoredPointSet, r: f64) -> Result<FlcReport, GeometryError> {
    let w = points.window();
    if w < 3.0 * r {
        return Err(GeometryError::WindowTooSmall { window: w, needed: 3.0 * r });
    }
    let emb = points.embedding();
    let safe = (w - r - margin(points)).max(0.0);
    let (tagged, pos) = colored(points);
    let index = GridIndex::auto(&pos);
    let centers: Vec<Vec<i64>> = points.union().into_iter().filter(|p| emb.within(&p.key, safe)).map(|p| p.key).collect();
    let signature = |x: &Vec<i64>| -> (bool, Vec<(usize, Vec<i64>)>) {
        let xf = emb.position(x);
        let mut sig: Vec<(usize, Vec<i64>)> = index
            .within(&xf, r * (1.0 + 1e-9) + 1e-9)
            .into_iter()
            .filter_map(|i| {
                let (c, k) = &tagged[i];
                let rel: Vec<i64> = k.iter().zip(x).map(|(a, b)| a - b).collect();
                emb.within(&rel, r).then_some((*c, rel))
            })
            .collect();
        sig.sort();
        (emb.within(x, safe / 2.0), sig)
    };
    let sigs: Vec<(bool, Vec<(usize, Vec<i64>)>)> = centers.par_iter().map(signature).collect();
    let full: HashSet<&Vec<(usize, Vec<i64>)>> = sigs.iter().map(|(_, s)| s).collect();
    let half: HashSet<&Vec<(usize, Vec<i64>)>> = sigs.iter().filter(|(h, _)| *h).map(|(_, s)| s).collect();
    let centers_half = sigs.iter().filter(|(h, _)| *h).count();
    Ok(FlcReport {
        cluster_radius: r,
        window: w,
        safe_radius: safe,
        centers: centers.len(),
        class_count: full.len(),
        centers_half,
        class_count_half: half.len(),
        verdict: if full.len() == half.len() { FlcVerdict::FlcConsistent } else { FlcVerdict::Growing },
    })
}

/// Packing radius (half the minimum distance) and covering radius (largest empty
/// ball with centre in the safe interior) of the union of colors.
pub fn delone_constants(points: &ColoredPointSet) -> Result<DeloneConstants, GeometryError> {
    let union: Vec<Vec<f64>> = points.union().into_iter().map(|p| p.pos).collect();
    if union.len() < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: union.len() });
    }
    let d = points.dim();
    let safe = (points.window() - margin(points)).max(0.0);
    let inner: Vec<Vec<f64>> = union.iter().filter(|p| p.iter().map(|x| x * x).sum::<f64>() <= safe * safe).cloned().collect();
    let (gap, _, _) = min_pair_distance(if inner.len() >= 2 { &inner } else { &union }).expect("two points");
    let half = safe / (d as f64).sqrt();
    let lo = vec![-half; d];
    let hi = vec![half; d];
    let cells = (2.0 * half / (gap / 8.0)).powi(d as i32);
    let h = if cells > 1e6 { 2.0 * half / 1e6f64.powf(1.0 / d as f64) } else { gap / 8.0 };
    Ok(DeloneConstants {
        packing_radius: gap / 2.0,
        covering_radius: max_empty_ball(&union, &lo, &hi, h),
        safe_radius: safe,
        points: union.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_has_one_class() {
        let z = ColoredPointSet::lattice_cube(1, 30);
        let f = flc_check(&z, 1.5).unwrap();
        assert_eq!((f.class_count, f.verdict), (1, FlcVerdict::FlcConsistent));
        assert!(flc_check(&z, 11.0).is_err());
        let c = delone_constants(&z).unwrap();
        assert_eq!((c.packing_radius, c.covering_radius), (0.5, 0.5));
    }
}
