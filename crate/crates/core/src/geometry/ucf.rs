//! Cluster frequencies on centred cubes and their spread over translates.

use std::collections::HashSet;

use serde::Serialize;

use crate::arithmetic::AlgebraicVector;
use crate::substitution::ColoredPointSet;

use super::GeometryError;

#[derive(Clone, Debug, Serialize)]
pub struct UcfEstimate {
    /// Half side `n` of each cube `x + [-n, n]^d`.
    pub sizes: Vec<f64>,
    /// Per size, the offsets `x` (multiples of the main diagonal).
    pub offsets: Vec<Vec<f64>>,
    /// `frequencies[k][o]`: occurrences per unit volume in cube `k` at offset `o`.
    pub frequencies: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// `max - min` over offsets.
    pub spread: Vec<f64>,
    pub occurrences: usize,
}

impl UcfEstimate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,mean,spread\n");
        for k in 0..self.sizes.len() {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", self.sizes[k], self.mean[k], self.spread[k]));
        }
        out
    }
}

/// Frequencies `L_P(x + F_n) / Vol(F_n)` of the cluster `P` (pairs of color and
/// position) over nested cubes `F_n = [-n, n]^d` and `2·offsets + 1` translates `x`.
pub fn ucf_estimate(
    points: &ColoredPointSet,
    cluster: &[(usize, AlgebraicVector)],
    sizes: &[f64],
    offsets: usize,
) -> Result<UcfEstimate, GeometryError> {
    let d = points.dim();
    let emb = points.embedding();
    let limit = points.window() / (d as f64).sqrt();
    if let Some(&n) = sizes.iter().find(|&&n| n > limit) {
        return Err(GeometryError::WindowTooSmall { window: points.window(), needed: n * (d as f64).sqrt() });
    }
    let mut occ: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    if let Some((c0, p0)) = cluster.first() {
        let rel: Vec<(usize, Vec<i64>)> = cluster
            .iter()
            .map(|(c, v)| Ok((*c, emb.key_of(&v.sub(p0))?)))
            .collect::<Result<_, crate::substitution::SubstitutionError>>()?;
        let sets: Vec<HashSet<&[i64]>> =
            (0..points.colors()).map(|c| points.points(c).iter().map(|p| p.key.as_slice()).collect()).collect();
        for y in points.points(*c0) {
            let mut lo = y.pos.clone();
            let mut hi = y.pos.clone();
            let ok = rel.iter().all(|(c, r)| {
                let z: Vec<i64> = y.key.iter().zip(r).map(|(a, b)| a + b).collect();
                if !sets[*c].contains(z.as_slice()) {
                    return false;
                }
                for (k, x) in emb.position(&z).into_iter().enumerate() {
                    lo[k] = lo[k].min(x);
                    hi[k] = hi[k].max(x);
                }
                true
            });
            if ok {
                occ.push((lo, hi));
            }
        }
    }
    let mut est = UcfEstimate {
        sizes: sizes.to_vec(),
        offsets: Vec::new(),
        frequencies: Vec::new(),
        mean: Vec::new(),
        spread: Vec::new(),
        occurrences: occ.len(),
    };
    for &n in sizes {
        let room = (limit - n).max(0.0);
        let shifts: Vec<f64> = if offsets == 0 {
            vec![0.0]
        } else {
            (-(offsets as i64)..=offsets as i64).map(|k| room * k as f64 / offsets as f64).collect()
        };
        let vol = (2.0 * n).powi(d as i32);
        let freqs: Vec<f64> = shifts
            .iter()
            .map(|&x| {
                let count = occ
                    .iter()
                    .filter(|(lo, hi)| (0..d).all(|k| lo[k] >= x - n && hi[k] <= x + n))
                    .count();
                count as f64 / vol
            })
            .collect();
        let mean = freqs.iter().sum::<f64>() / freqs.len() as f64;
        let spread = freqs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - freqs.iter().copied().fold(f64::INFINITY, f64::min);
        est.offsets.push(shifts);
        est.frequencies.push(freqs);
        est.mean.push(mean);
        est.spread.push(spread);
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::NumberField;

    #[test]
    fn lattice_frequency_tends_to_one() {
        let z = ColoredPointSet::lattice_cube(1, 400);
        let q = NumberField::rationals();
        let p = [(0, AlgebraicVector::zero(&q, 1))];
        let e = ucf_estimate(&z, &p, &[10.0, 100.0, 200.0], 3).unwrap();
        assert!(e.mean.iter().all(|f| (f - 1.0).abs() <= 0.051));
        assert!(e.spread[2] <= 0.0051);
    }
}
