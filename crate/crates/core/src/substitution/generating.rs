//! Generating clusters (`P ⊆ Φ^p(P)`) and complete patch generation.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arithmetic::{AlgebraicVector, RationalMatrix};
use crate::geometry::supports::{interval_hulls, solve_adjoint_supports, SupportApproximation};

use super::legality::{is_legal, DEFAULT_LEGALITY_POINT_CAP};
use super::patch::{ColoredPointSet, Embedding, IntMfs};
use super::system::SubstitutionSystem;
use super::validate::sigma_min;
use super::SubstitutionError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratingMode {
    /// The single fixed point of smallest period and norm.
    Smallest,
    /// A legal cluster whose supports cover a neighbourhood of the origin,
    /// so that `Φ^{np}(P)` exhausts the whole multiset.
    Interior,
}

/// One point of a cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub color: usize,
    pub point: AlgebraicVector,
}

#[derive(Clone, Debug)]
pub struct GeneratingCluster {
    pub mode: GeneratingMode,
    pub points: Vec<Generator>,
    /// `P ⊆ Φ^period(P)` holds exactly.
    pub period: usize,
    color_names: Vec<String>,
}

#[derive(Serialize)]
pub struct GeneratingSummary {
    pub mode: GeneratingMode,
    pub period: usize,
    pub points: Vec<(String, Vec<Vec<String>>, Vec<f64>)>,
}

impl GeneratingCluster {
    pub fn describe(&self) -> String {
        let parts: Vec<String> =
            self.points.iter().map(|g| format!("{} at {}", self.color_names[g.color], g.point)).collect();
        format!("{{{}}} with period {}", parts.join("; "), self.period)
    }

    pub fn summary(&self) -> GeneratingSummary {
        GeneratingSummary {
            mode: self.mode,
            period: self.period,
            points: self
                .points
                .iter()
                .map(|g| (self.color_names[g.color].clone(), g.point.coeff_strings(), g.point.to_f64()))
                .collect(),
        }
    }

    pub fn as_pairs(&self) -> Vec<(usize, AlgebraicVector)> {
        self.points.iter().map(|g| (g.color, g.point.clone())).collect()
    }

    pub fn denominator(&self) -> i64 {
        self.points
            .iter()
            .flat_map(|g| g.point.flat())
            .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()))
            .to_i64()
            .unwrap_or(i64::MAX)
    }

    /// Per-color keys in `emb`.
    pub fn rekeyed(&self, emb: &Arc<Embedding>) -> Result<Vec<Vec<Vec<i64>>>, SubstitutionError> {
        let mut keys = vec![Vec::new(); self.color_names.len()];
        for g in &self.points {
            keys[g.color].push(emb.key_of(&g.point)?);
        }
        Ok(keys)
    }
}

/// Composed digit sets of `Φ^p` in stacked rational coordinates.
fn composed_flat_digits(
    sys: &SubstitutionSystem,
    reg: &RationalMatrix,
    prev: &[Vec<Vec<Vec<BigRational>>>],
) -> Vec<Vec<Vec<Vec<BigRational>>>> {
    let m = sys.colors();
    let base: Vec<Vec<Vec<Vec<BigRational>>>> =
        sys.digits().iter().map(|row| row.iter().map(|set| set.iter().map(|a| a.flat()).collect()).collect()).collect();
    let mut out = vec![vec![Vec::new(); m]; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for b in &prev[k][j] {
                    let qb = reg.mul_vec(b);
                    for a in &base[i][k] {
                        out[i][j].push(qb.iter().zip(a).map(|(x, y)| x + y).collect());
                    }
                }
            }
        }
    }
    out
}

const MAX_DIGITS_PER_LEVEL: usize = 400_000;

/// Fixed points `(color, x)` of period `p` branches, `x = Q^p x + a`, within `radius`,
/// produced one period at a time.
struct PeriodicPoints<'a> {
    sys: &'a SubstitutionSystem,
    reg: RationalMatrix,
    qp: RationalMatrix,
    digits: Vec<Vec<Vec<Vec<BigRational>>>>,
    p: usize,
    k_max: usize,
    radius: f64,
}

impl<'a> PeriodicPoints<'a> {
    fn new(sys: &'a SubstitutionSystem, k_max: usize, radius: f64) -> Self {
        let reg = sys.q().regular_representation();
        let digits =
            sys.digits().iter().map(|row| row.iter().map(|set| set.iter().map(|a| a.flat()).collect()).collect()).collect();
        PeriodicPoints { sys, qp: reg.clone(), reg, digits, p: 0, k_max, radius }
    }
}

impl Iterator for PeriodicPoints<'_> {
    type Item = (usize, Vec<(usize, AlgebraicVector)>);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.p >= self.k_max {
                return None;
            }
            self.p += 1;
            if self.p > 1 {
                let total: usize = self.digits.iter().flatten().map(Vec::len).sum();
                if total > MAX_DIGITS_PER_LEVEL {
                    return None;
                }
                self.digits = composed_flat_digits(self.sys, &self.reg, &self.digits);
                self.qp = self.reg.mul(&self.qp);
            }
            let n = self.reg.rows();
            let Some(inv) = RationalMatrix::identity(n).sub(&self.qp).inverse() else { continue };
            let mut found: Vec<(usize, AlgebraicVector)> = Vec::new();
            for j in 0..self.sys.colors() {
                for a in &self.digits[j][j] {
                    let x = AlgebraicVector::from_flat(self.sys.field(), &inv.mul_vec(a));
                    if x.norm_f64() <= self.radius && !found.iter().any(|(c, y)| *c == j && *y == x) {
                        found.push((j, x));
                    }
                }
            }
            found.sort_by(|a, b| a.1.norm_f64().total_cmp(&b.1.norm_f64()).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
            return Some((self.p, found));
        }
    }
}

/// Tile model used to decide whether a cluster covers a neighbourhood of the origin.
enum Cover {
    Exact(Vec<(crate::arithmetic::AlgebraicScalar, crate::arithmetic::AlgebraicScalar)>),
    Raster(SupportApproximation, Vec<Vec<f64>>),
}

impl Cover {
    fn build(sys: &SubstitutionSystem) -> Result<Cover, SubstitutionError> {
        if sys.dimension() == 1 {
            return Ok(Cover::Exact(interval_hulls(sys)?));
        }
        let raster = solve_adjoint_supports(sys, 0.02, 16)?;
        let scale = (0..sys.colors())
            .map(|c| raster.raster_volume(c).powf(1.0 / sys.dimension() as f64))
            .fold(f64::INFINITY, f64::min);
        let rho = 0.15 * scale;
        let d = sys.dimension();
        let mut ring = Vec::new();
        let count = 24;
        for k in 0..count {
            let t = 0.2 + k as f64 * std::f64::consts::TAU / count as f64;
            let mut z = vec![0.0; d];
            z[0] = rho * t.cos();
            z[1] = rho * t.sin();
            for (i, zi) in z.iter_mut().enumerate().skip(2) {
                *zi = rho * 0.37 * ((k + i) as f64).sin();
            }
            ring.push(z);
        }
        Ok(Cover::Raster(raster, ring))
    }

    fn touches(&self, color: usize, x: &AlgebraicVector) -> bool {
        match self {
            Cover::Exact(iv) => {
                let lo = &x.entries()[0] + &iv[color].0;
                let hi = &x.entries()[0] + &iv[color].1;
                lo.sign() <= 0 && hi.sign() >= 0
            }
            Cover::Raster(r, ring) => {
                let xf = x.to_f64_accurate();
                ring.iter().any(|z| {
                    let y: Vec<f64> = z.iter().zip(&xf).map(|(a, b)| a - b).collect();
                    r.raster_contains(color, &y)
                })
            }
        }
    }

    /// Covers a neighbourhood of the origin with pairwise disjoint interiors.
    fn covers_without_overlap(&self, pts: &[(usize, AlgebraicVector)]) -> bool {
        match self {
            Cover::Exact(iv) => {
                let ivs: Vec<_> = pts
                    .iter()
                    .map(|(c, x)| (&x.entries()[0] + &iv[*c].0, &x.entries()[0] + &iv[*c].1))
                    .collect();
                for a in 0..ivs.len() {
                    for b in a + 1..ivs.len() {
                        let lo = if ivs[a].0 > ivs[b].0 { &ivs[a].0 } else { &ivs[b].0 };
                        let hi = if ivs[a].1 < ivs[b].1 { &ivs[a].1 } else { &ivs[b].1 };
                        if lo < hi {
                            return false;
                        }
                    }
                }
                let inside = ivs.iter().any(|(l, r)| l.sign() < 0 && r.sign() > 0);
                let left = ivs.iter().any(|(l, r)| l.sign() < 0 && r.is_zero());
                let right = ivs.iter().any(|(l, r)| l.is_zero() && r.sign() > 0);
                inside || (left && right)
            }
            Cover::Raster(r, ring) => {
                let xs: Vec<(usize, Vec<f64>)> = pts.iter().map(|(c, x)| (*c, x.to_f64_accurate())).collect();
                ring.iter().all(|z| {
                    let hits = xs
                        .iter()
                        .filter(|(c, x)| {
                            let y: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
                            r.raster_contains(*c, &y)
                        })
                        .count();
                    hits == 1
                })
            }
        }
    }
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

const MAX_TOUCHING: usize = 14;
const MAX_CLUSTER: usize = 6;

/// Searches periods `p ≤ k_max` for a cluster of `p`-periodic points within
/// `search_radius`. Every such cluster satisfies `P ⊆ Φ^p(P)` exactly.
pub fn find_generating(
    sys: &SubstitutionSystem,
    search_radius: f64,
    k_max: usize,
    mode: GeneratingMode,
) -> Result<GeneratingCluster, SubstitutionError> {
    let levels = PeriodicPoints::new(sys, k_max, search_radius);
    let make = |period: usize, pts: Vec<(usize, AlgebraicVector)>| GeneratingCluster {
        mode,
        points: pts.into_iter().map(|(color, point)| Generator { color, point }).collect(),
        period,
        color_names: sys.color_names().to_vec(),
    };
    match mode {
        GeneratingMode::Smallest => {
            for (p, found) in levels {
                if let Some(first) = found.into_iter().next() {
                    return Ok(make(p, vec![first]));
                }
            }
            Err(SubstitutionError::NoGenerating(format!(
                "no periodic point within radius {search_radius} for periods up to {k_max}"
            )))
        }
        GeneratingMode::Interior => {
            let cover = Cover::build(sys)?;
            for (p, found) in levels {
                let touching: Vec<(usize, AlgebraicVector)> =
                    found.into_iter().filter(|(c, x)| cover.touches(*c, x)).take(MAX_TOUCHING).collect();
                for size in 1..=touching.len().min(MAX_CLUSTER) {
                    for idx in subsets(touching.len(), size) {
                        let pts: Vec<(usize, AlgebraicVector)> = idx.iter().map(|&i| touching[i].clone()).collect();
                        if !cover.covers_without_overlap(&pts) {
                            continue;
                        }
                        if is_legal(sys, &pts, 8, DEFAULT_LEGALITY_POINT_CAP)?.is_legal() {
                            return Ok(make(p, pts));
                        }
                    }
                }
            }
            Err(SubstitutionError::NoGenerating(format!(
                "no legal periodic cluster covering the origin within radius {search_radius} for periods up to {k_max}"
            )))
        }
    }
}

/// Default search parameters for interior generating clusters.
pub fn default_generating(sys: &SubstitutionSystem) -> Result<GeneratingCluster, SubstitutionError> {
    let radius = 4.0 * sys.max_digit_norm() + 4.0;
    find_generating(sys, radius, 8, GeneratingMode::Interior)
}

/// All points of each `Λ_i` in the closed ball `B_R(0)`.
pub fn generate_patch(sys: &SubstitutionSystem, r: f64) -> Result<ColoredPointSet, SubstitutionError> {
    let g = default_generating(sys)?;
    generate_patch_from(sys, &g, r)
}

/// Patch generation from a known interior generating cluster.
///
/// Iterates `Y ← Φ^q(Y) ∩ B_ρ` from `Y = P`, where `q` is a multiple of the
/// cluster period with `σ_min(Q^q) > 1` and `ρ ≥ max|a| / (σ_min − 1)`, so no
/// point outside `B_ρ` has descendants inside it. The sets increase; once two
/// consecutive sets agree the ball is complete.
pub fn generate_patch_from(
    sys: &SubstitutionSystem,
    g: &GeneratingCluster,
    r: f64,
) -> Result<ColoredPointSet, SubstitutionError> {
    if g.mode != GeneratingMode::Interior {
        return Err(SubstitutionError::NoGenerating(
            "patch generation needs an interior generating cluster".into(),
        ));
    }
    let den = sys.digit_denominator().lcm(&num_bigint::BigInt::from(g.denominator()));
    let den = den.to_i64().ok_or_else(|| SubstitutionError::Overflow("patch denominator".into()))?;
    let emb = Embedding::new(sys.field(), sys.dimension(), den);
    let base = IntMfs::new(sys, &emb)?;
    let mut q = g.period;
    let s1 = sigma_min(sys);
    let sigma = |q: usize| -> f64 {
        if sys.dimension() == 1 {
            s1.powi(q as i32)
        } else {
            let m = sys.q_f64().pow(q as u32);
            m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
        }
    };
    while sigma(q) < 1.5 {
        q += g.period;
        if q > 64 {
            return Err(SubstitutionError::NotExpansive("no power of Q has smallest singular value above 1".into()));
        }
    }
    let mfs = base.pow(q)?;
    let s = sigma(q);
    let cluster_norm = g.points.iter().map(|p| p.point.norm_f64()).fold(0.0, f64::max);
    let rho = r.max(mfs.max_digit_norm() / (s - 1.0)).max(cluster_norm) * (1.0 + 1e-9) + 1e-9;
    let rho2 = rho * rho;
    let keep = |k: &[i64]| emb.position(k).iter().map(|x| x * x).sum::<f64>() <= rho2;
    let mut keys = g.rekeyed(&emb)?;
    let mut count: usize = keys.iter().map(Vec::len).sum();
    for _ in 0..400 {
        let next = mfs.step_filtered(&keys, keep)?;
        let n: usize = next.iter().map(Vec::len).sum();
        keys = next;
        if n == count {
            let full = ColoredPointSet::from_keys(&emb, sys.color_names().to_vec(), keys, rho)?;
            return Ok(full.restrict_ball(r).with_window(r));
        }
        count = n;
    }
    Err(SubstitutionError::Inconsistent("patch generation did not stabilise".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::system;

    #[test]
    fn smallest_fixed_points() {
        let fib = system("fibonacci");
        let g = find_generating(&fib, 10.0, 8, GeneratingMode::Smallest).unwrap();
        assert_eq!(g.period, 1);
        assert_eq!(g.points, vec![Generator { color: 0, point: fib.zero_vector() }]);
        let src = r#"{"name":"shift","dimension":1,"colors":1,"Q":[["2"]],"digits":[[[["1"]]]]}"#;
        let sys = SubstitutionSystem::from_json(src).unwrap();
        let g = find_generating(&sys, 10.0, 4, GeneratingMode::Smallest).unwrap();
        assert_eq!(g.points[0].point, sys.vector(&["-1"]).unwrap());
        assert!(find_generating(&sys, 0.5, 4, GeneratingMode::Smallest).is_err());
    }

    #[test]
    fn fibonacci_interior_cluster() {
        let fib = system("fibonacci");
        let g = default_generating(&fib).unwrap();
        assert_eq!(g.period, 2);
        let mut pts = g.as_pairs();
        pts.sort();
        assert_eq!(pts, vec![(0, fib.zero_vector()), (1, fib.vector(&["-1"]).unwrap())]);
    }

    #[test]
    fn origin_patch() {
        let fib = system("fibonacci");
        let p = generate_patch(&fib, 0.0).unwrap();
        assert_eq!(p.counts(), vec![1, 0]);
    }

    #[test]
    fn window_consistency() {
        let fib = system("fibonacci");
        let small = generate_patch(&fib, 10.0).unwrap();
        let big = generate_patch(&fib, 25.0).unwrap().restrict_ball(10.0);
        assert_eq!(small.keys(), big.keys());
    }
}
