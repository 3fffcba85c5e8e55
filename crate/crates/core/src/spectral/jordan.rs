//! Expansion `<Q^n w, α> = Σ_i P_i(n) λ_i^n` with polynomials `P_i` of degree
//! below the largest Jordan block of `λ_i`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::eigen::SpectralData;
use super::SpectralError;

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionTerm {
    pub lambda: (f64, f64),
    /// Coefficients of `P_i` as `(re, im)`, constant term first.
    pub coeffs: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct JordanExpansion {
    pub terms: Vec<ExpansionTerm>,
    /// Largest residual over the fitting range, relative to `max|λ|^n`.
    pub residual: f64,
    pub condition: f64,
    pub ill_conditioned: bool,
    pub fit_range: usize,
}

impl JordanExpansion {
    pub fn eval(&self, n: u32) -> Complex64 {
        let nf = n as f64;
        self.terms
            .iter()
            .map(|t| {
                let lam = Complex64::new(t.lambda.0, t.lambda.1);
                let p: Complex64 = t
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| Complex64::new(c.0, c.1) * nf.powi(k as i32))
                    .sum();
                p * lam.powu(n)
            })
            .sum()
    }
}

/// Direct evaluation of `<Q^n w, α>` for `n = 0..=n_max`.
pub fn inner_products(q: &DMatrix<f64>, w: &[f64], alpha: &[f64], n_max: usize) -> Vec<f64> {
    let a = DVector::from_column_slice(alpha);
    let mut v = DVector::from_column_slice(w);
    let mut out = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        out.push(v.dot(&a));
        v = q * v;
    }
    out
}

pub fn jordan_expansion(
    q: &DMatrix<f64>,
    spec: &SpectralData,
    w: &[f64],
    alpha: &[f64],
) -> Result<JordanExpansion, SpectralError> {
    let d = q.nrows();
    if w.len() != d || alpha.len() != d {
        return Err(SpectralError::Shape(format!("vectors must have dimension {d}")));
    }
    let mut cols: Vec<(usize, usize)> = Vec::new();
    for (i, e) in spec.eigenvalues.iter().enumerate() {
        let size = e.jordan_blocks.iter().copied().max().unwrap_or(1);
        for k in 0..size {
            cols.push((i, k));
        }
    }
    let fit = (2 * d + 2).max(cols.len() + 2);
    let targets = inner_products(q, w, alpha, fit);
    let rho = spec.eigenvalues.iter().map(|e| e.z().norm()).fold(1.0, f64::max);
    let rows = fit + 1;
    let mut a = DMatrix::<Complex64>::zeros(rows, cols.len());
    let mut b = DVector::<Complex64>::zeros(rows);
    for n in 0..rows {
        let scale = rho.powi(-(n as i32));
        for (c, &(i, k)) in cols.iter().enumerate() {
            let lam = spec.eigenvalues[i].z();
            let nk = if k == 0 { 1.0 } else { (n as f64).powi(k as i32) };
            a[(n, c)] = lam.powu(n as u32) * nk * scale;
        }
        b[n] = Complex64::new(targets[n] * scale, 0.0);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = svd.solve(&b, 1e-14 * smax).map_err(|e| SpectralError::Numeric(e.to_string()))?;
    let resid = (&a * &x - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut terms: Vec<ExpansionTerm> = spec
        .eigenvalues
        .iter()
        .map(|e| ExpansionTerm { lambda: (e.re, e.im), coeffs: Vec::new() })
        .collect();
    for (c, &(i, _)) in cols.iter().enumerate() {
        terms[i].coeffs.push((x[c].re, x[c].im));
    }
    Ok(JordanExpansion { terms, residual: resid, condition, ill_conditioned: condition > 1e10, fit_range: fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{FieldMatrix, NumberField, RationalMatrix};
    use crate::spectral::eigen::spectral_data;

    fn setup(rows: &[Vec<i64>]) -> (DMatrix<f64>, SpectralData) {
        let r = RationalMatrix::from_i64(rows);
        let spec = spectral_data(&FieldMatrix::from_rational(&NumberField::rationals(), &r)).unwrap();
        (r.to_f64(), spec)
    }

    #[test]
    fn jordan_block_gives_linear_polynomial() {
        let (q, spec) = setup(&[vec![2, 1], vec![0, 2]]);
        let e = jordan_expansion(&q, &spec, &[0.0, 1.0], &[1.0, 0.0]).unwrap();
        // n 2^(n-1): P(n) = n/2
        let c = &e.terms[0].coeffs;
        assert!(c[0].0.abs() < 1e-10 && (c[1].0 - 0.5).abs() < 1e-10);
        for n in 0..20u32 {
            let expect = n as f64 * 2f64.powi(n as i32 - 1);
            assert!((e.eval(n).re - expect).abs() <= 1e-8 * 2f64.powi(n as i32));
        }
    }

    #[test]
    fn diagonal_case() {
        let (q, spec) = setup(&[vec![2, 0], vec![0, 3]]);
        let e = jordan_expansion(&q, &spec, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        for t in &e.terms {
            assert!((t.coeffs[0].0 - 1.0).abs() < 1e-10);
        }
    }
}
