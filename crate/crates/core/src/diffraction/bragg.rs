//! Bragg peaks: grid maxima refined by golden-section search and accepted when
//! `I_n(k)/Vol(F_n)` is stable over the last three windows.

use rayon::prelude::*;
use serde::Serialize;

use super::intensity::{IntensityProfile, Sorted};
use super::{relative_density, DiffractionError};

#[derive(Clone, Debug, Serialize)]
pub struct BraggParams {
    /// Cube half sides, increasing; at least three.
    pub windows: Vec<f64>,
    /// Peaks are searched in `[-box_half, box_half]^d`.
    pub box_half: f64,
    /// Acceptance threshold as a multiple of the squared density.
    pub threshold_factor: f64,
    /// Largest relative spread of the last three scores.
    pub stability: f64,
    /// Cap on the number of grid wavevectors.
    pub max_grid: usize,
}

impl BraggParams {
    pub fn new(windows: Vec<f64>, box_half: f64) -> Self {
        BraggParams { windows, box_half, threshold_factor: 1e-3, stability: 0.25, max_grid: 400_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BraggPeak {
    pub k: Vec<f64>,
    /// `I_n(k)/Vol(F_n)` per window.
    pub scores: Vec<f64>,
}

impl BraggPeak {
    pub fn intensity(&self) -> f64 {
        *self.scores.last().expect("at least one window")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BraggSet {
    pub windows: Vec<f64>,
    pub density: f64,
    pub threshold: f64,
    pub box_half: f64,
    pub spacing: f64,
    pub grid_points: usize,
    pub candidates: usize,
    pub peaks: Vec<BraggPeak>,
    /// Largest empty-ball radius of the peak set in the search box.
    pub max_gap: f64,
}

impl BraggSet {
    pub fn to_csv(&self) -> String {
        let d = self.peaks.first().map_or(1, |p| p.k.len());
        let mut out = String::new();
        for c in 0..d {
            out.push_str(&format!("k{c},"));
        }
        out.push_str("intensity\n");
        for p in &self.peaks {
            for x in &p.k {
                out.push_str(&format!("{x:.17e},"));
            }
            out.push_str(&format!("{:.17e}\n", p.intensity()));
        }
        out
    }
}

fn check(points: &[Vec<f64>], params: &BraggParams) -> Result<usize, DiffractionError> {
    let Some(first) = points.first() else { return Err(DiffractionError::Empty) };
    let w = &params.windows;
    if w.len() < 3 || w.windows(2).any(|p| p[1] <= p[0]) || w[0] <= 0.0 {
        return Err(DiffractionError::Invalid("need at least three increasing windows".into()));
    }
    Ok(first.len())
}

/// Grid spacing and per-axis count for the scan window.
fn grid(params: &BraggParams, d: usize) -> (f64, usize) {
    let n_scan = params.windows[params.windows.len() - 2];
    let mut h = 1.0 / (4.0 * n_scan);
    let per_axis = |h: f64| (2.0 * params.box_half / h).round() as usize + 1;
    let cap = (params.max_grid as f64).powf(1.0 / d as f64).floor() as usize;
    if per_axis(h) > cap {
        h = 2.0 * params.box_half / (cap.max(2) - 1) as f64;
    }
    (h, per_axis(h))
}

fn grid_point(idx: usize, per: usize, d: usize, h: f64, b: f64) -> Vec<f64> {
    let mut i = idx;
    (0..d)
        .map(|_| {
            let c = i % per;
            i /= per;
            -b + c as f64 * h
        })
        .collect()
}

/// Intensities on the search grid at the second largest window.
pub fn scan_profile(points: &[Vec<f64>], params: &BraggParams) -> Result<IntensityProfile, DiffractionError> {
    let d = check(points, params)?;
    let (h, per) = grid(params, d);
    let ks: Vec<Vec<f64>> = (0..per.pow(d as u32)).map(|i| grid_point(i, per, d, h, params.box_half)).collect();
    let n_scan = params.windows[params.windows.len() - 2];
    super::intensity(points, &[n_scan], &ks)
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - GOLDEN * (b - a);
    let mut e = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fe = f(e);
    while (b - a).abs() > tol {
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + GOLDEN * (b - a);
            fe = f(e);
        }
    }
    (a + b) / 2.0
}

/// Bragg peaks of a point list inside the search box.
pub fn detect_bragg(points: &[Vec<f64>], params: &BraggParams) -> Result<BraggSet, DiffractionError> {
    let d = check(points, params)?;
    let sorted = Sorted::new(points);
    let windows = &params.windows;
    let n_last = *windows.last().expect("checked");
    let n_scan = windows[windows.len() - 2];
    let density = sorted.count(n_last) as f64 / (2.0 * n_last).powi(d as i32);
    let threshold = params.threshold_factor * density * density;
    let (h, per) = grid(params, d);
    let total = per.pow(d as u32);
    let vol_scan = (2.0 * n_scan).powi(d as i32);
    let scan: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|i| sorted.intensities(&grid_point(i, per, d, h, params.box_half), &[n_scan])[0] / vol_scan)
        .collect();
    // local maxima over the full neighbourhood
    let maxima: Vec<usize> = (0..total)
        .into_par_iter()
        .filter(|&i| {
            let v = scan[i];
            if v < 0.5 * threshold {
                return false;
            }
            let coords: Vec<usize> = (0..d).map(|a| (i / per.pow(a as u32)) % per).collect();
            (0..3usize.pow(d as u32)).all(|mut o| {
                let mut j = 0;
                for (a, &c) in coords.iter().enumerate() {
                    let step = o % 3;
                    o /= 3;
                    let c2 = c as i64 + step as i64 - 1;
                    if c2 < 0 || c2 >= per as i64 {
                        return true;
                    }
                    j += c2 as usize * per.pow(a as u32);
                }
                scan[j] <= v
            })
        })
        .collect();
    let mut peaks: Vec<BraggPeak> = maxima
        .par_iter()
        .filter_map(|&i| {
            let mut k = grid_point(i, per, d, h, params.box_half);
            for _ in 0..d.min(2) {
                for a in 0..d {
                    let f = |x: f64| {
                        let mut kk = k.clone();
                        kk[a] = x;
                        sorted.intensities(&kk, &[n_last])[0]
                    };
                    k[a] = golden_max(f, k[a] - h, k[a] + h, 1e-10);
                }
            }
            let vals = sorted.intensities(&k, windows);
            let scores: Vec<f64> =
                vals.iter().zip(windows).map(|(v, n)| v / (2.0 * n).powi(d as i32)).collect();
            let last3 = &scores[scores.len() - 3..];
            let hi = last3.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = last3.iter().copied().fold(f64::INFINITY, f64::min);
            (hi - lo <= params.stability * hi && scores[scores.len() - 1] >= threshold && k.iter().all(|x| x.abs() <= params.box_half + h))
                .then_some(BraggPeak { k, scores })
        })
        .collect();
    peaks.sort_by(|a, b| {
        a.k.iter().zip(&b.k).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut merged: Vec<BraggPeak> = Vec::new();
    for p in peaks {
        if let Some(q) = merged.iter_mut().find(|q| q.k.iter().zip(&p.k).all(|(x, y)| (x - y).abs() <= h / 2.0)) {
            if p.intensity() > q.intensity() {
                *q = p;
            }
        } else {
            merged.push(p);
        }
    }
    let lo = vec![-params.box_half; d];
    let hi = vec![params.box_half; d];
    let ks: Vec<Vec<f64>> = merged.iter().map(|p| p.k.clone()).collect();
    Ok(BraggSet {
        windows: windows.clone(),
        density,
        threshold,
        box_half: params.box_half,
        spacing: h,
        grid_points: total,
        candidates: maxima.len(),
        max_gap: if ks.is_empty() { f64::INFINITY } else { relative_density(&ks, &lo, &hi) },
        peaks: merged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_peaks_sit_on_integers() {
        let z: Vec<Vec<f64>> = (-200..=200).map(|i| vec![i as f64]).collect();
        let b = detect_bragg(&z, &BraggParams::new(vec![50.0, 100.0, 200.0], 3.0)).unwrap();
        let ks: Vec<f64> = b.peaks.iter().map(|p| p.k[0]).collect();
        assert_eq!(ks.len(), 7, "{ks:?}");
        for (k, want) in ks.iter().zip(-3..=3) {
            assert!((k - want as f64).abs() < 1e-6);
        }
        assert!((b.max_gap - 0.5).abs() < 1e-6);
    }

    #[test]
    fn golden_section_finds_the_maximum() {
        let x = golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
    }
}
