//! Uniform-grid spatial index for nearest-neighbour and range queries.

use std::collections::HashMap;

use rayon::prelude::*;

pub struct GridIndex<'a> {
    pts: &'a [Vec<f64>],
    cell: f64,
    d: usize,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    /// Index with cell side `cell` (roughly the typical spacing works best).
    pub fn new(pts: &'a [Vec<f64>], cell: f64) -> Self {
        let d = pts.first().map_or(1, Vec::len);
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            buckets.entry(Self::cell_of(p, cell)).or_default().push(i);
        }
        GridIndex { pts, cell, d, buckets }
    }

    /// Cell side chosen so that about one point falls in each cell.
    pub fn auto(pts: &'a [Vec<f64>]) -> Self {
        let d = pts.first().map_or(1, Vec::len);
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in pts {
            for i in 0..d {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let vol: f64 = (0..d).map(|i| (hi[i] - lo[i]).max(1e-9)).product();
        let cell = (vol / pts.len().max(1) as f64).powf(1.0 / d as f64);
        Self::new(pts, cell)
    }

    fn cell_of(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    fn shell(&self, center: &[i64], r: i64, out: &mut Vec<usize>) {
        let d = self.d;
        let side = (2 * r + 1) as usize;
        let total = side.pow(d as u32);
        let mut off = vec![0i64; d];
        for idx in 0..total {
            let mut t = idx;
            let mut on_shell = false;
            for o in off.iter_mut() {
                *o = (t % side) as i64 - r;
                t /= side;
                on_shell |= o.abs() == r;
            }
            if !on_shell {
                continue;
            }
            let c: Vec<i64> = center.iter().zip(&off).map(|(a, b)| a + b).collect();
            if let Some(v) = self.buckets.get(&c) {
                out.extend_from_slice(v);
            }
        }
    }

    /// Nearest indexed point to `q`, skipping `exclude`.
    pub fn nearest(&self, q: &[f64], exclude: Option<usize>) -> Option<(f64, usize)> {
        if self.pts.len() <= usize::from(exclude.is_some()) {
            return None;
        }
        let center = Self::cell_of(q, self.cell);
        let mut best: Option<(f64, usize)> = None;
        let mut buf = Vec::new();
        for r in 0.. {
            buf.clear();
            self.shell(&center, r, &mut buf);
            for &i in &buf {
                if Some(i) == exclude {
                    continue;
                }
                let dist = dist(q, &self.pts[i]);
                if best.map_or(true, |(b, _)| dist < b) {
                    best = Some((dist, i));
                }
            }
            // every point outside the searched block is at least r*cell away
            if let Some((b, _)) = best {
                if b <= r as f64 * self.cell {
                    break;
                }
            }
            if r > 1_000_000 {
                break;
            }
        }
        best
    }

    /// Indices of points within distance `r` of `q`.
    pub fn within(&self, q: &[f64], r: f64) -> Vec<usize> {
        let center = Self::cell_of(q, self.cell);
        let reach = (r / self.cell).ceil() as i64 + 1;
        let mut buf = Vec::new();
        for s in 0..=reach {
            self.shell(&center, s, &mut buf);
        }
        buf.retain(|&i| dist(q, &self.pts[i]) <= r);
        buf
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Volume of the Euclidean ball of radius `r` in dimension `d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    // Γ(d/2 + 1) by the half-integer recursion
    let mut g = if d % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() / 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        g *= k as f64 / 2.0;
        k += 2;
    }
    std::f64::consts::PI.powf(d as f64 / 2.0) * r.powi(d as i32) / g
}

/// Closest pair `(distance, i, j)` among at least two points.
pub fn min_pair_distance(pts: &[Vec<f64>]) -> Option<(f64, usize, usize)> {
    if pts.len() < 2 {
        return None;
    }
    let index = GridIndex::auto(pts);
    (0..pts.len())
        .into_par_iter()
        .filter_map(|i| index.nearest(&pts[i], Some(i)).map(|(dd, j)| (dd, i.min(j), i.max(j))))
        .min_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))))
}

/// Largest empty-ball radius over centres in the box `[lo, hi]`; every point
/// of `pts` counts as an obstacle, inside the box or not.
///
/// In one dimension this is exact. In higher dimensions the centres are
/// sampled on a grid of spacing `h`.
pub fn max_empty_ball(pts: &[Vec<f64>], lo: &[f64], hi: &[f64], h: f64) -> f64 {
    let d = lo.len();
    if pts.is_empty() {
        return f64::INFINITY;
    }
    if d == 1 {
        let mut xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        let (a, b) = (lo[0], hi[0]);
        let mut best = (xs[0] - a).max(b - xs[xs.len() - 1]).max(0.0);
        for w in xs.windows(2) {
            if w[1] < a || w[0] > b {
                continue;
            }
            let c = ((w[0] + w[1]) / 2.0).clamp(a, b);
            best = best.max((c - w[0]).min(w[1] - c));
        }
        return best;
    }
    let index = GridIndex::auto(pts);
    let counts: Vec<usize> = (0..d).map(|i| ((hi[i] - lo[i]) / h).ceil().max(0.0) as usize + 1).collect();
    let total: usize = counts.iter().product();
    (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let q: Vec<f64> = (0..d)
                .map(|i| {
                    let k = idx % counts[i];
                    idx /= counts[i];
                    (lo[i] + k as f64 * h).min(hi[i])
                })
                .collect();
            index.nearest(&q, None).map_or(f64::INFINITY, |(r, _)| r)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_constants() {
        let pts: Vec<Vec<f64>> = (-5..=5).map(|i| vec![i as f64]).collect();
        assert_eq!(min_pair_distance(&pts).unwrap().0, 1.0);
        assert_eq!(max_empty_ball(&pts, &[-5.0], &[5.0], 0.1), 0.5);
        let grid: Vec<Vec<f64>> = (-4..=4).flat_map(|i| (-4..=4).map(move |j| vec![i as f64, j as f64])).collect();
        let index = GridIndex::auto(&grid);
        assert_eq!(index.within(&[0.0, 0.0], 1.0).len(), 5);
        let r = max_empty_ball(&grid, &[-3.0, -3.0], &[3.0, 3.0], 0.25);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((ball_volume(1, 2.0) - 4.0).abs() < 1e-12);
        assert!((ball_volume(2, 1.0) - std::f64::consts::PI).abs() < 1e-12);
        assert!((ball_volume(3, 1.0) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
