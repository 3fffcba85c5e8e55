//! Prototile supports `A_j` solving `Q A_j = ∪_i (D_ij + A_i)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::arithmetic::AlgebraicScalar;
use crate::substitution::{SubstitutionError, SubstitutionSystem};

/// Raster approximation of the supports, with exact hulls in dimension one.
#[derive(Clone, Debug)]
pub struct SupportApproximation {
    pub d: usize,
    pub h: f64,
    /// Box `[-half_width, half_width]^d` containing every support.
    pub half_width: f64,
    pub cells_per_axis: usize,
    /// Per color, occupancy of each cell (index `Σ c_k · n^k`).
    pub rasters: Vec<Vec<bool>>,
    pub iterations: usize,
    /// `diam(seed) · c^n` with `c` the contraction of `Q^{-1}`.
    pub error_bound: f64,
    pub contraction: f64,
    /// Exact `[l_j, r_j]` hulls when `d = 1`.
    pub intervals: Option<Vec<(AlgebraicScalar, AlgebraicScalar)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportSummary {
    pub resolution: f64,
    pub iterations: usize,
    pub error_bound: f64,
    pub volumes: Vec<f64>,
    pub intervals: Option<Vec<(String, String)>>,
}

/// Operator norm of `Q^{-1}` raised until below one; returns `(p, ‖Q^{-p}‖)`.
pub fn contraction_power(q: &DMatrix<f64>) -> Result<(usize, f64), SubstitutionError> {
    let inv = q
        .clone()
        .try_inverse()
        .ok_or_else(|| SubstitutionError::NotExpansive("Q is singular".into()))?;
    let mut acc = inv.clone();
    for p in 1..=64 {
        let c = acc.singular_values().max();
        if c < 1.0 {
            return Ok((p, c));
        }
        acc = &acc * &inv;
    }
    Err(SubstitutionError::NotExpansive("no power of Q^{-1} contracts".into()))
}

/// Composed float digits of `Φ^p`.
fn composed_digits(sys: &SubstitutionSystem, p: usize) -> Vec<Vec<Vec<DVector<f64>>>> {
    let m = sys.colors();
    let q = sys.q_f64();
    let base: Vec<Vec<Vec<DVector<f64>>>> = sys
        .digits()
        .iter()
        .map(|row| row.iter().map(|set| set.iter().map(|a| DVector::from_vec(a.to_f64_accurate())).collect()).collect())
        .collect();
    let mut acc = base.clone();
    for _ in 1..p {
        let mut next = vec![vec![Vec::new(); m]; m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for b in &acc[k][j] {
                        let qb = &q * b;
                        for a in &base[i][k] {
                            next[i][j].push(&qb + a);
                        }
                    }
                }
            }
        }
        acc = next;
    }
    acc
}

/// Solves `A x = b` over the number field by Gaussian elimination.
pub(crate) fn solve_exact(mut a: Vec<Vec<AlgebraicScalar>>, mut b: Vec<AlgebraicScalar>) -> Option<Vec<AlgebraicScalar>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv()?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
            let t = &f * &b[col];
            b[r] = &b[r] - &t;
        }
    }
    Some((0..n).map(|i| &b[i] * &a[i][i].inv().expect("nonzero pivot")).collect())
}

/// Exact convex hulls `[l_j, r_j]` of the one-dimensional supports.
pub fn interval_hulls(sys: &SubstitutionSystem) -> Result<Vec<(AlgebraicScalar, AlgebraicScalar)>, SubstitutionError> {
    if sys.dimension() != 1 {
        return Err(SubstitutionError::Inconsistent("interval hulls need dimension 1".into()));
    }
    let m = sys.colors();
    let qs = sys.q().get(0, 0).clone();
    let q = qs.to_f64_accurate();
    let pos = q > 0.0;
    let digits: Vec<Vec<Vec<(AlgebraicScalar, f64)>>> = sys
        .digits()
        .iter()
        .map(|row| {
            row.iter()
                .map(|set| set.iter().map(|a| (a.entries()[0].clone(), a.entries()[0].to_f64_accurate())).collect())
                .collect()
        })
        .collect();
    // unknowns: l_j at index j, r_j at index m + j
    let mut l = vec![0.0; m];
    let mut r = vec![0.0; m];
    let mut policy = vec![(0usize, 0usize, 0usize); 2 * m];
    for _ in 0..400 {
        let mut nl = vec![f64::INFINITY; m];
        let mut nr = vec![f64::NEG_INFINITY; m];
        for j in 0..m {
            for i in 0..m {
                for (k, (_, a)) in digits[i][j].iter().enumerate() {
                    let (lo_src, hi_src) = if pos { (i, m + i) } else { (m + i, i) };
                    let lo_val = if pos { l[i] } else { r[i] };
                    let hi_val = if pos { r[i] } else { l[i] };
                    let cand_l = (a + lo_val) / q;
                    let cand_r = (a + hi_val) / q;
                    if cand_l < nl[j] {
                        nl[j] = cand_l;
                        policy[j] = (lo_src, i, k);
                    }
                    if cand_r > nr[j] {
                        nr[j] = cand_r;
                        policy[m + j] = (hi_src, i, k);
                    }
                }
            }
            if !nl[j].is_finite() {
                return Err(SubstitutionError::Inconsistent(format!("color {} is never produced", sys.color_names()[j])));
            }
        }
        l = nl;
        r = nr;
    }
    let field = sys.field();
    let zero = AlgebraicScalar::zero(field);
    let n = 2 * m;
    let mut a = vec![vec![zero.clone(); n]; n];
    let mut b = vec![zero.clone(); n];
    for row in 0..n {
        let (src, i, k) = policy[row];
        let j = row % m;
        a[row][row] = &a[row][row] + &qs;
        a[row][src] = &a[row][src] - &AlgebraicScalar::one(field);
        b[row] = digits[i][j][k].0.clone();
    }
    let sol = solve_exact(a, b).ok_or_else(|| SubstitutionError::Inconsistent("hull system is singular".into()))?;
    let hull: Vec<(AlgebraicScalar, AlgebraicScalar)> = (0..m).map(|j| (sol[j].clone(), sol[m + j].clone())).collect();
    // exact verification of the min/max policy
    let qinv = qs.inv().expect("Q is nonzero");
    for j in 0..m {
        for i in 0..m {
            for (a, _) in &digits[i][j] {
                let (lo_i, hi_i) = if pos { (&hull[i].0, &hull[i].1) } else { (&hull[i].1, &hull[i].0) };
                let cl = &(a + lo_i) * &qinv;
                let cr = &(a + hi_i) * &qinv;
                if cl.exact_cmp(&hull[j].0).is_lt() || cr.exact_cmp(&hull[j].1).is_gt() {
                    return Err(SubstitutionError::Inconsistent("hull policy failed exact verification".into()));
                }
            }
        }
    }
    Ok(hull)
}

impl SupportApproximation {
    fn index(&self, z: &[f64]) -> Option<usize> {
        let n = self.cells_per_axis;
        let mut idx = 0usize;
        for k in (0..self.d).rev() {
            let c = ((z[k] + self.half_width) / self.h).floor();
            if c < 0.0 || c >= n as f64 {
                return None;
            }
            idx = idx * n + c as usize;
        }
        Some(idx)
    }

    fn center(&self, mut idx: usize) -> Vec<f64> {
        let n = self.cells_per_axis;
        (0..self.d)
            .map(|_| {
                let c = idx % n;
                idx /= n;
                -self.half_width + (c as f64 + 0.5) * self.h
            })
            .collect()
    }

    /// Raster membership of `z` in `A_color` (exact hull test in dimension one).
    pub fn contains(&self, color: usize, z: &[f64]) -> bool {
        if let Some(iv) = &self.intervals {
            let (l, r) = (&iv[color].0, &iv[color].1);
            return z[0] >= l.to_f64_accurate() && z[0] <= r.to_f64_accurate();
        }
        self.index(z).is_some_and(|i| self.rasters[color][i])
    }

    pub fn raster_contains(&self, color: usize, z: &[f64]) -> bool {
        self.index(z).is_some_and(|i| self.rasters[color][i])
    }

    /// True if the cell of `z` or one of its neighbours is occupied.
    fn dilated_contains(&self, color: usize, z: &[f64]) -> bool {
        let d = self.d;
        let total = 3usize.pow(d as u32);
        let mut y = z.to_vec();
        (0..total).any(|mut t| {
            for k in 0..d {
                y[k] = z[k] + ((t % 3) as f64 - 1.0) * self.h;
                t /= 3;
            }
            self.raster_contains(color, &y)
        })
    }

    /// Raster volume of `A_color` (exact hull length in dimension one).
    pub fn volume(&self, color: usize) -> f64 {
        if let Some(iv) = &self.intervals {
            return (&iv[color].1 - &iv[color].0).to_f64_accurate();
        }
        self.raster_volume(color)
    }

    pub fn raster_volume(&self, color: usize) -> f64 {
        self.rasters[color].iter().filter(|&&b| b).count() as f64 * self.h.powi(self.d as i32)
    }

    /// Hausdorff distance between the rasters of two approximations on the same grid.
    pub fn hausdorff(&self, other: &SupportApproximation, color: usize) -> f64 {
        let a: Vec<Vec<f64>> =
            (0..self.rasters[color].len()).filter(|&i| self.rasters[color][i]).map(|i| self.center(i)).collect();
        let b: Vec<Vec<f64>> =
            (0..other.rasters[color].len()).filter(|&i| other.rasters[color][i]).map(|i| other.center(i)).collect();
        if a.is_empty() || b.is_empty() {
            return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
        }
        let one_way = |x: &[Vec<f64>], y: &[Vec<f64>]| {
            let index = super::neighbors::GridIndex::new(y, self.h * 2.0);
            x.iter().map(|p| index.nearest(p, None).map_or(f64::INFINITY, |t| t.0)).fold(0.0, f64::max)
        };
        one_way(&a, &b).max(one_way(&b, &a))
    }

    /// Plain-text raster of one color (2D only), `#` for occupied cells, top row first.
    pub fn to_text(&self, color: usize) -> String {
        let n = self.cells_per_axis;
        let mut out = format!("# color {color} h {} half_width {} d {}\n", self.h, self.half_width, self.d);
        if self.d == 1 {
            out.extend((0..n).map(|i| if self.rasters[color][i] { '#' } else { '.' }));
            out.push('\n');
            return out;
        }
        for y in (0..n).rev() {
            out.extend((0..n).map(|x| if self.rasters[color][y * n + x] { '#' } else { '.' }));
            out.push('\n');
        }
        out
    }

    /// Portable graymap (2D only).
    pub fn to_pgm(&self, color: usize) -> String {
        let n = self.cells_per_axis;
        let rows = if self.d == 1 { 1 } else { n };
        let mut out = format!("P2\n# h={} half_width={}\n{n} {rows}\n1\n", self.h, self.half_width);
        for y in (0..rows).rev() {
            let line: Vec<&str> =
                (0..n).map(|x| if self.rasters[color][y * n + x] { "1" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> SupportSummary {
        SupportSummary {
            resolution: self.h,
            iterations: self.iterations,
            error_bound: self.error_bound,
            volumes: (0..self.rasters.len()).map(|c| self.volume(c)).collect(),
            intervals: self
                .intervals
                .as_ref()
                .map(|iv| iv.iter().map(|(l, r)| (l.to_string(), r.to_string())).collect()),
        }
    }
}

/// Backward Hutchinson iteration on a raster: a cell of `A_j` survives when
/// `Q·centre − a` lands in a surviving cell of `A_i` for some `a ∈ D_ij`.
pub fn solve_adjoint_supports(
    sys: &SubstitutionSystem,
    h: f64,
    iterations: usize,
) -> Result<SupportApproximation, SubstitutionError> {
    let d = sys.dimension();
    let m = sys.colors();
    let q = sys.q_f64();
    let (p, c) = contraction_power(&q)?;
    let digits = composed_digits(sys, p);
    let qp = q.pow(p as u32);
    let max_a = digits.iter().flatten().flatten().map(|a| a.norm()).fold(0.0, f64::max);
    let radius = c * max_a / (1.0 - c);
    let half_width = radius + 2.0 * h;
    let n = (2.0 * half_width / h).ceil() as usize;
    let total = n.checked_pow(d as u32).filter(|&t| t <= 50_000_000).ok_or_else(|| {
        SubstitutionError::Inconsistent(format!("raster of {n}^{d} cells is too large; use a coarser resolution"))
    })?;
    let mut approx = SupportApproximation {
        d,
        h,
        half_width,
        cells_per_axis: n,
        rasters: vec![vec![true; total]; m],
        iterations: 0,
        error_bound: 0.0,
        contraction: c,
        intervals: None,
    };
    // seed: the ball of radius `radius`
    for col in 0..m {
        for i in 0..total {
            let z = approx.center(i);
            approx.rasters[col][i] = z.iter().map(|x| x * x).sum::<f64>().sqrt() <= radius + h;
        }
    }
    let seed_diam = 2.0 * radius;
    use rayon::prelude::*;
    for _ in 0..iterations {
        let prev = approx.clone();
        let next: Vec<Vec<bool>> = (0..m)
            .into_par_iter()
            .map(|j| {
                (0..total)
                    .map(|idx| {
                        if !prev.rasters[j][idx] {
                            return false;
                        }
                        let z = DVector::from_vec(prev.center(idx));
                        let qz = &qp * &z;
                        (0..m).any(|i| {
                            digits[i][j].iter().any(|a| {
                                let y = &qz - a;
                                prev.raster_contains(i, y.as_slice())
                            })
                        })
                    })
                    .collect()
            })
            .collect();
        approx.rasters = next;
    }
    if iterations > 0 {
        // follow exact orbits a few levels before the raster lookup; this
        // shrinks the boundary bias of the snapped iteration by c^levels
        let levels = (16f64.ln() / (1.0 / c).ln()).ceil() as usize;
        let prev = approx.clone();
        approx.rasters = (0..m)
            .into_par_iter()
            .map(|j| {
                (0..total)
                    .map(|idx| {
                        if !prev.dilated_contains(j, &prev.center(idx)) {
                            return false;
                        }
                        let mut states = vec![(j, DVector::from_vec(prev.center(idx)))];
                        for _ in 0..levels {
                            let mut next = Vec::new();
                            for (col, y) in &states {
                                let qy = &qp * y;
                                for i in 0..m {
                                    for a in &digits[i][*col] {
                                        let z = &qy - a;
                                        if prev.dilated_contains(i, z.as_slice()) {
                                            next.push((i, z));
                                        }
                                    }
                                }
                            }
                            if next.is_empty() || next.len() > 4096 {
                                return !next.is_empty();
                            }
                            states = next;
                        }
                        states.iter().any(|(i, y)| prev.raster_contains(*i, y.as_slice()))
                    })
                    .collect()
            })
            .collect();
    }
    approx.iterations = iterations;
    approx.error_bound = seed_diam * c.powi(iterations as i32);
    if d == 1 {
        approx.intervals = Some(interval_hulls(sys)?);
    }
    Ok(approx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::system;

    #[test]
    fn fibonacci_hulls() {
        let sys = system("fibonacci");
        let hull = interval_hulls(&sys).unwrap();
        assert!(hull[0].0.is_zero() && hull[1].0.is_zero());
        assert_eq!(hull[0].1, AlgebraicScalar::theta(sys.field()));
        assert_eq!(hull[1].1, AlgebraicScalar::one(sys.field()));
    }

    #[test]
    fn fibonacci_raster_matches_hulls() {
        let sys = system("fibonacci");
        let s = solve_adjoint_supports(&sys, 0.01, 30).unwrap();
        assert!((s.raster_volume(0) - 1.618033988749895).abs() < 0.05);
        assert!((s.raster_volume(1) - 1.0).abs() < 0.05);
        assert!(s.error_bound < 1e-4);
    }

    #[test]
    fn zero_iterations_return_the_seed() {
        let sys = system("fibonacci");
        let s = solve_adjoint_supports(&sys, 0.05, 0).unwrap();
        assert_eq!(s.error_bound, 2.0 * (s.half_width - 0.1));
    }

    #[test]
    fn chair_supports_are_trominoes() {
        let sys = system("chair2d");
        let s = solve_adjoint_supports(&sys, 0.05, 12).unwrap();
        for c in 0..4 {
            assert!((s.volume(c) - 3.0).abs() < 0.06, "area {}", s.volume(c));
        }
        assert!(s.contains(0, &[1.5, 0.5]));
        assert!(!s.contains(0, &[1.5, 1.5]));
    }
}
