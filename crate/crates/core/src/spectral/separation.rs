//! Certified lower bounds for `|S(λ)|` over integer polynomials with bounded
//! coefficients, for a Pisot number `λ`.
//!
//! For `S ∈ Z[x]` with `S(λ) ≠ 0` the norm `Π_σ S(σλ)` is a nonzero integer,
//! so `|S(λ)| ≥ 1 / Π_{λ'≠λ} |S(λ')|`, and each conjugate factor is at most
//! `C · Σ_{k≤K} Σ_n n^k |λ'|^n`. The inner sums have the closed form
//! `r·A_k(r)/(1-r)^(k+1)` with Eulerian polynomials `A_k`, evaluated exactly
//! at a rational upper bound of `|λ'|`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arithmetic::factor::factor;
use crate::arithmetic::rational::dyadic_ceil;
use crate::arithmetic::roots::certified_roots;
use crate::arithmetic::{AlgebraicScalar, Poly, RationalMatrix};

use super::SpectralError;

#[derive(Clone, Debug, Serialize)]
pub struct SeparationCertificate {
    pub lambda: f64,
    pub minimal_polynomial: Vec<String>,
    pub coeff_bound: u64,
    pub poly_degree_cap: usize,
    /// Polynomial length covered; `None` means unbounded.
    pub horizon: Option<usize>,
    pub multiplier_b: u64,
    /// Product of the per-conjugate bounds.
    pub c2: String,
    pub conjugate_count: usize,
    pub conjugate_moduli_upper: Vec<String>,
    pub lower_bound: String,
    pub lower_bound_f64: f64,
}

/// Minimal polynomial over `Q` of a field element.
pub fn minimal_polynomial(x: &AlgebraicScalar) -> Poly {
    let m = RationalMatrix::from_rows(x.multiplication_matrix());
    let chi = m.charpoly();
    for (f, _) in factor(&chi).factors {
        let mut acc = AlgebraicScalar::zero(x.field());
        for c in f.coeffs().iter().rev() {
            acc = &(&acc * x) + &AlgebraicScalar::from_rational(x.field(), c.clone());
        }
        if acc.is_zero() {
            return f;
        }
    }
    chi.squarefree_part()
}

fn eulerian_row(k: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for n in 1..=k {
        let mut next = vec![BigInt::zero(); n];
        for m in 0..n {
            let a = if m >= 1 && m - 1 < row.len() { &row[m - 1] * BigInt::from(n - m) } else { BigInt::zero() };
            let b = if m < row.len() { &row[m] * BigInt::from(m + 1) } else { BigInt::zero() };
            next[m] = a + b;
        }
        row = next;
    }
    row
}

/// Exact value of `Σ_{n≥0} n^k r^n` for rational `0 ≤ r < 1`.
pub fn power_sum(r: &BigRational, k: usize) -> BigRational {
    let one = BigRational::one();
    let denom = &one - r;
    if k == 0 {
        return &one / denom;
    }
    let row = eulerian_row(k);
    let mut num = BigRational::zero();
    let mut rp = r.clone();
    for a in &row {
        num += BigRational::from_integer(a.clone()) * &rp;
        rp = &rp * r;
    }
    num / num_traits::pow(denom, k + 1)
}

pub fn separation_bound(
    lambda: &AlgebraicScalar,
    coeff_bound: u64,
    poly_degree_cap: usize,
    multiplier_b: u64,
) -> Result<SeparationCertificate, SpectralError> {
    if coeff_bound == 0 || multiplier_b == 0 {
        return Err(SpectralError::Shape("coefficient bound and multiplier must be positive".into()));
    }
    let f = minimal_polynomial(lambda);
    if !f.is_integral() {
        return Err(SpectralError::NotPisot(format!("{lambda} is not an algebraic integer (minimal polynomial {f})")));
    }
    let lam = lambda.to_f64_accurate();
    if lam <= 1.0 {
        return Err(SpectralError::NotPisot(format!("{lambda} is not greater than one")));
    }
    let roots = certified_roots(&f).ok_or_else(|| SpectralError::Precision(format!("roots of {f} not separated")))?;
    let self_idx = roots
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.z() - lam).norm().total_cmp(&(b.1.z() - lam).norm()))
        .map(|(i, _)| i)
        .expect("at least one root");
    let mut product = BigRational::one();
    let mut moduli = Vec::new();
    let cb = BigRational::from_integer(BigInt::from(coeff_bound) * BigInt::from(multiplier_b));
    for (i, r) in roots.iter().enumerate() {
        if i == self_idx {
            continue;
        }
        let (_, hi) = r.modulus_bounds();
        let hi = hi * (1.0 + 4.0 * f64::EPSILON);
        if hi >= 1.0 {
            return Err(SpectralError::NotPisot(format!(
                "conjugate {}{:+}i of {lambda} has modulus up to {hi}",
                r.re, r.im
            )));
        }
        let r_hi = dyadic_ceil(hi, 64);
        let mut s = BigRational::zero();
        for k in 0..=poly_degree_cap {
            s += power_sum(&r_hi, k);
        }
        moduli.push(r_hi.to_string());
        product *= &cb * s;
    }
    let bound = BigRational::one() / (BigRational::from_integer(BigInt::from(multiplier_b)) * &product);
    let mut bf = bound.to_f64().unwrap_or(0.0);
    if BigRational::from_float(bf).is_some_and(|x| x > bound) {
        bf *= 1.0 - 2.0 * f64::EPSILON;
    }
    Ok(SeparationCertificate {
        lambda: lam,
        minimal_polynomial: f.to_strings(),
        coeff_bound,
        poly_degree_cap,
        horizon: None,
        multiplier_b,
        c2: product.to_string(),
        conjugate_count: roots.len() - 1,
        conjugate_moduli_upper: moduli,
        lower_bound: bound.to_string(),
        lower_bound_f64: bf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::{int, rat};
    use crate::arithmetic::NumberField;

    #[test]
    fn power_sums_match_series() {
        let r = rat(1, 3);
        for k in 0..4 {
            let closed = power_sum(&r, k).to_f64().unwrap();
            let series: f64 = (0..200).map(|n| (n as f64).powi(k as i32) * (1.0f64 / 3.0).powi(n)).sum();
            assert!((closed - series).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn golden_bound() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::one()], int(1), int(2)).unwrap();
        let c = separation_bound(&AlgebraicScalar::theta(&k), 1, 0, 1).unwrap();
        // 1 - 1/φ = 1/φ² ≈ 0.381966
        assert!((c.lower_bound_f64 - 0.381_966_011_250_105).abs() < 1e-9);
        assert!(c.lower_bound_f64 < 0.381_966_011_250_106);
    }

    #[test]
    fn integer_lambda_bound_is_one() {
        let q = NumberField::rationals();
        let c = separation_bound(&AlgebraicScalar::from_int(&q, 2), 1, 0, 1).unwrap();
        assert_eq!(c.lower_bound, "1");
    }

    #[test]
    fn non_pisot_rejected() {
        let k = NumberField::new(&[BigInt::from(-3), BigInt::from(-1), BigInt::one()], int(2), int(3)).unwrap();
        assert!(matches!(separation_bound(&AlgebraicScalar::theta(&k), 1, 0, 1), Err(SpectralError::NotPisot(_))));
    }
}
