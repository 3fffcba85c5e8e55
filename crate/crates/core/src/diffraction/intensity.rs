//! `I_n(k) = |Σ_{x ∈ Λ ∩ F_n} e^{-2πi⟨k,x⟩}|² / Vol(F_n)` on centred cubes `F_n = [-n, n]^d`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::DiffractionError;

#[derive(Clone, Debug, Serialize)]
pub struct IntensityProfile {
    pub dim: usize,
    /// Half sides `n` of the cubes.
    pub windows: Vec<f64>,
    /// Points inside each cube.
    pub counts: Vec<usize>,
    pub k: Vec<Vec<f64>>,
    /// `values[i][w] = I_{n_w}(k_i)`.
    pub values: Vec<Vec<f64>>,
}

impl IntensityProfile {
    pub fn volume(&self, w: usize) -> f64 {
        (2.0 * self.windows[w]).powi(self.dim as i32)
    }

    /// `I_n(k) / Vol(F_n)`, which tends to the Bragg intensity at `k`.
    pub fn score(&self, i: usize, w: usize) -> f64 {
        self.values[i][w] / self.volume(w)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in 0..self.dim {
            out.push_str(&format!("k{c},"));
        }
        out.push_str("n,intensity\n");
        for (k, vals) in self.k.iter().zip(&self.values) {
            for (n, v) in self.windows.iter().zip(vals) {
                for x in k {
                    out.push_str(&format!("{x:.17e},"));
                }
                out.push_str(&format!("{n:.17e},{v:.17e}\n"));
            }
        }
        out
    }
}

/// Points sorted by max-norm, with the sorted norms.
pub(crate) struct Sorted {
    pub pts: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

impl Sorted {
    pub fn new(points: &[Vec<f64>]) -> Self {
        let mut v: Vec<(f64, Vec<f64>)> =
            points.iter().map(|p| (p.iter().fold(0.0f64, |m, x| m.max(x.abs())), p.clone())).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        Sorted { norms: v.iter().map(|t| t.0).collect(), pts: v.into_iter().map(|t| t.1).collect() }
    }

    pub fn count(&self, n: f64) -> usize {
        self.norms.partition_point(|&x| x <= n)
    }

    /// Exponential sums over the nested cubes `windows` (ascending).
    pub fn sums(&self, k: &[f64], windows: &[f64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(windows.len());
        let mut acc = Complex64::new(0.0, 0.0);
        let mut i = 0;
        for &n in windows {
            while i < self.pts.len() && self.norms[i] <= n {
                let t: f64 = self.pts[i].iter().zip(k).map(|(x, y)| x * y).sum();
                let (s, c) = (std::f64::consts::TAU * (t - t.round())).sin_cos();
                acc += Complex64::new(c, -s);
                i += 1;
            }
            out.push(acc);
        }
        out
    }

    pub fn intensities(&self, k: &[f64], windows: &[f64]) -> Vec<f64> {
        let d = k.len() as i32;
        self.sums(k, windows).iter().zip(windows).map(|(s, n)| s.norm_sqr() / (2.0 * n).powi(d)).collect()
    }
}

/// Intensities of the point list at every `k` for nested cubes of half side `windows`.
pub fn intensity(points: &[Vec<f64>], windows: &[f64], ks: &[Vec<f64>]) -> Result<IntensityProfile, DiffractionError> {
    let Some(first) = points.first() else { return Err(DiffractionError::Empty) };
    let d = first.len();
    if windows.is_empty() || windows.windows(2).any(|w| w[1] <= w[0]) || windows[0] <= 0.0 {
        return Err(DiffractionError::Invalid("windows must be positive and increasing".into()));
    }
    if ks.iter().any(|k| k.len() != d) {
        return Err(DiffractionError::Invalid(format!("wavevectors must have dimension {d}")));
    }
    let sorted = Sorted::new(points);
    let values = ks.par_iter().map(|k| sorted.intensities(k, windows)).collect();
    Ok(IntensityProfile {
        dim: d,
        windows: windows.to_vec(),
        counts: windows.iter().map(|&n| sorted.count(n)).collect(),
        k: ks.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sums() {
        let z: Vec<Vec<f64>> = (-100..=100).map(|i| vec![i as f64]).collect();
        let p = intensity(&z, &[25.0, 50.0, 100.0], &[vec![0.0], vec![1.0], vec![0.5], vec![-0.5]]).unwrap();
        for w in 0..3 {
            let n = p.windows[w];
            let expect = (2.0 * n + 1.0).powi(2) / (2.0 * n);
            assert!((p.values[1][w] - expect).abs() < 1e-9 * expect);
            assert!(p.values[2][w] <= 1.0 / (2.0 * n) + 1e-12);
            assert!((p.values[2][w] - p.values[3][w]).abs() < 1e-12);
        }
        assert_eq!(p.counts, vec![51, 101, 201]);
        assert!(intensity(&[], &[1.0], &[vec![0.0]]).is_err());
    }
}
