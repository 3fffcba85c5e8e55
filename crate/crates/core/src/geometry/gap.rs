//! Minimum gap of the difference set `(Λ − Λ) ∩ B_R`, computed exactly.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::AlgebraicScalar;
use crate::substitution::{ColoredPointSet, Embedding, Point};

use super::neighbors::{ball_volume, min_pair_distance, GridIndex};
use super::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeyerVerdict {
    /// The last three radii give exactly the same gap.
    Stabilized,
    /// Strictly decreasing, last value below 0.9 times the first.
    Decaying,
    /// Distinct differences per unit volume keep growing.
    DenseDifferences,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapCurve {
    pub radii: Vec<f64>,
    pub min_gap: Vec<f64>,
    /// Exact gap per radius as power-basis coefficients: the gap itself in
    /// dimension one, its square otherwise.
    pub exact: Vec<Vec<String>>,
    pub points: Vec<usize>,
    pub differences: Vec<usize>,
    /// Distinct differences per unit volume of `B_R`.
    pub difference_density: Vec<f64>,
    /// Last over first entry of `difference_density`.
    pub density_growth: f64,
    pub monotone: bool,
    pub verdict: MeyerVerdict,
    #[serde(skip)]
    values: Vec<AlgebraicScalar>,
}

impl GapCurve {
    /// Exact gap value at radius index `i` (squared when `d > 1`).
    pub fn exact_value(&self, i: usize) -> &AlgebraicScalar {
        &self.values[i]
    }

    /// True when radii `i` and `j` give exactly the same gap.
    pub fn exactly_equal(&self, i: usize, j: usize) -> bool {
        self.values[i] == self.values[j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,min_gap\n");
        for (r, g) in self.radii.iter().zip(&self.min_gap) {
            out.push_str(&format!("{r:.17e},{g:.17e}\n"));
        }
        out
    }
}

fn key_sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Minimum positive gap between the distinct values of `(Λ∩B_R − Λ∩B_R) ∩ B_R`
/// for a one-dimensional set; returns `(float, exact, distinct count)`.
fn gap_1d(emb: &Embedding, pts: &[Point], r: f64) -> Option<(f64, AlgebraicScalar, usize)> {
    let slack = 1e-9 * (1.0 + r);
    // pairs (value, hi index, lo index) with value = x_hi − x_lo > 0
    let mut diffs: Vec<(f64, u32, u32)> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|j| {
            let base = pts[j].pos[0];
            pts[j + 1..]
                .iter()
                .enumerate()
                .take_while(move |(_, p)| p.pos[0] - base <= r + slack)
                .filter(move |(_, p)| {
                    let v = p.pos[0] - base;
                    v < r - slack || emb.within(&key_sub(&p.key, &pts[j].key), r)
                })
                .map(move |(o, p)| (p.pos[0] - base, (j + 1 + o) as u32, j as u32))
        })
        .collect();
    if diffs.is_empty() {
        return None;
    }
    diffs.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let key = |e: &(f64, u32, u32)| key_sub(&pts[e.1 as usize].key, &pts[e.2 as usize].key);
    let exact = |k: &[i64]| emb.scalar_of(k, 0);
    // group nearly equal floats, then split groups into exact values
    let tol = |x: f64| 1e-9 * (1.0 + x.abs());
    let mut values: Vec<(f64, Vec<i64>)> = Vec::new();
    let mut i = 0;
    while i < diffs.len() {
        let start = diffs[i].0;
        let mut j = i + 1;
        while j < diffs.len() && diffs[j].0 - diffs[j - 1].0 <= tol(start) {
            j += 1;
        }
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut group: Vec<(f64, Vec<i64>)> = Vec::new();
        for e in &diffs[i..j] {
            let k = key(e);
            if seen.insert(k.clone()) {
                group.push((e.0, k));
            }
        }
        if group.len() > 1 {
            group.sort_by(|a, b| exact(&a.1).exact_cmp(&exact(&b.1)));
        }
        values.extend(group);
        i = j;
    }
    let n = values.len();
    // gap across the origin is twice the smallest positive difference
    let mut best_f = 2.0 * values[0].0;
    for w in values.windows(2) {
        best_f = best_f.min(w[1].0 - w[0].0);
    }
    let cut = best_f * (1.0 + 1e-6) + 1e-12;
    let mut best: Option<AlgebraicScalar> = None;
    let mut consider = |g: AlgebraicScalar| {
        if best.as_ref().map_or(true, |b| g.exact_cmp(b) == Ordering::Less) {
            best = Some(g);
        }
    };
    if 2.0 * values[0].0 <= cut {
        let d = exact(&values[0].1);
        consider(&d + &d);
    }
    for w in values.windows(2) {
        if w[1].0 - w[0].0 <= cut {
            consider(exact(&key_sub(&w[1].1, &w[0].1)));
        }
    }
    let best = best.expect("at least one candidate");
    Some((best.to_f64_accurate(), best, 2 * n))
}

/// Same in dimension `d ≥ 2`; the exact value returned is the squared gap.
fn gap_nd(emb: &Embedding, pts: &[Point], r: f64) -> Option<(f64, AlgebraicScalar, usize)> {
    let all: Vec<Vec<f64>> = pts.iter().map(|p| p.pos.clone()).collect();
    let near = GridIndex::auto(&all);
    let set: HashSet<Vec<i64>> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            near.within(&all[i], r * (1.0 + 1e-9) + 1e-9).into_iter().filter(move |&j| j != i).filter_map(move |j| {
                let k = key_sub(&pts[j].key, &pts[i].key);
                emb.within(&k, r).then_some(k)
            })
        })
        .collect();
    let keys: Vec<Vec<i64>> = set.into_iter().collect();
    let pos: Vec<Vec<f64>> = keys.iter().map(|k| emb.position(k)).collect();
    let (best_f, _, _) = min_pair_distance(&pos)?;
    let index = GridIndex::auto(&pos);
    let cut = best_f * (1.0 + 1e-6) + 1e-12;
    let keys = &keys;
    let best = (0..pos.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            index
                .within(&pos[i], cut)
                .into_iter()
                .filter(move |&j| j > i)
                .map(move |j| emb.norm_sq(&key_sub(&keys[j], &keys[i])))
                .collect::<Vec<_>>()
        })
        .min_by(|a, b| a.exact_cmp(b))?;
    let count = keys.len();
    Some((best.to_f64_accurate().sqrt(), best, count))
}

/// Largest tolerated growth of the difference density before the set is
/// reported as having dense differences.
pub const MAX_DENSITY_GROWTH: f64 = 1.2;

/// Exact minimum gap of the difference set of the union of colors, per radius.
pub fn meyer_gap_curve(points: &ColoredPointSet, radii: &[f64]) -> Result<GapCurve, GeometryError> {
    if let Some(&r) = radii.iter().find(|&&r| r > points.window() * (1.0 + 1e-12)) {
        return Err(GeometryError::WindowTooSmall { window: points.window(), needed: r });
    }
    let union = points.union();
    if union.len() < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: union.len() });
    }
    let emb = points.embedding();
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let mut curve = GapCurve {
        radii: radii.clone(),
        min_gap: Vec::new(),
        exact: Vec::new(),
        points: Vec::new(),
        differences: Vec::new(),
        difference_density: Vec::new(),
        density_growth: 1.0,
        monotone: true,
        verdict: MeyerVerdict::Inconclusive,
        values: Vec::new(),
    };
    for &r in &radii {
        let found = if emb.dim() == 1 { gap_1d(emb, &union, r) } else { gap_nd(emb, &union, r) };
        let Some((g, exact, count)) = found else {
            return Err(GeometryError::TooFewPoints { needed: 2, got: union.len() });
        };
        curve.points.push(union.len());
        curve.min_gap.push(g);
        curve.exact.push(exact.coeff_strings());
        curve.differences.push(count);
        curve.difference_density.push(count as f64 / ball_volume(emb.dim(), r));
        curve.values.push(exact);
    }
    let v = &curve.values;
    let n = v.len();
    curve.monotone = v.windows(2).all(|w| w[1].exact_cmp(&w[0]) != Ordering::Greater);
    curve.density_growth = curve.difference_density[n - 1] / curve.difference_density[0];
    let strictly = n >= 2 && v.windows(2).all(|w| w[1].exact_cmp(&w[0]) == Ordering::Less);
    curve.verdict = if strictly && curve.min_gap[n - 1] < 0.9 * curve.min_gap[0] {
        MeyerVerdict::Decaying
    } else if n >= 2 && curve.density_growth > MAX_DENSITY_GROWTH {
        MeyerVerdict::DenseDifferences
    } else if n >= 3 && v[n - 1] == v[n - 2] && v[n - 2] == v[n - 3] {
        MeyerVerdict::Stabilized
    } else {
        MeyerVerdict::Inconclusive
    };
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_gap_is_one() {
        let z = ColoredPointSet::lattice_cube(1, 100);
        let c = meyer_gap_curve(&z, &[10.0, 50.0, 100.0]).unwrap();
        assert_eq!(c.min_gap, vec![1.0, 1.0, 1.0]);
        assert_eq!(c.verdict, MeyerVerdict::Stabilized);
        let z2 = ColoredPointSet::lattice_cube(2, 6);
        let c = meyer_gap_curve(&z2, &[3.0, 6.0]).unwrap();
        assert_eq!(c.min_gap, vec![1.0, 1.0]);
        assert_eq!(c.exact[0], vec!["1".to_string()]);
    }

    #[test]
    fn needs_two_points_and_a_large_window() {
        let z = ColoredPointSet::lattice_cube(1, 0);
        assert!(matches!(meyer_gap_curve(&z, &[0.0]), Err(GeometryError::TooFewPoints { .. })));
        let z = ColoredPointSet::lattice_cube(1, 5);
        assert!(matches!(meyer_gap_curve(&z, &[6.0]), Err(GeometryError::WindowTooSmall { .. })));
    }
}
