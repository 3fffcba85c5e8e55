use serde::Serialize;

use super::eigen::SpectralData;
use super::SpectralError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PisotVerdict {
    PisotFamily,
    NotPisotFamily,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugateWitness {
    pub re: f64,
    pub im: f64,
    pub modulus_lo: f64,
    pub modulus_hi: f64,
    pub minimal_polynomial: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PisotFamilyVerdict {
    pub verdict: PisotVerdict,
    pub witnesses: Vec<ConjugateWitness>,
    /// Smallest certified distance from the unit circle among non-eigenvalue conjugates.
    pub margin: f64,
    /// Set when some factor exceeded the exact degree cap.
    pub numeric: bool,
}

/// Every conjugate of modulus at least one must itself be an eigenvalue of Q.
pub fn pisot_family_check(spec: &SpectralData) -> Result<PisotFamilyVerdict, SpectralError> {
    let mut witnesses = Vec::new();
    let mut margin = f64::INFINITY;
    for f in &spec.factors {
        if !f.is_eigenvalue.iter().any(|b| *b) {
            continue;
        }
        for (r, &eig) in f.roots.iter().zip(&f.is_eigenvalue) {
            if eig {
                continue;
            }
            let (lo, hi) = r.modulus_bounds();
            if hi < 1.0 {
                margin = margin.min(1.0 - hi);
            } else if lo >= 1.0 {
                margin = margin.min(lo - 1.0);
                witnesses.push(ConjugateWitness {
                    re: r.re,
                    im: r.im,
                    modulus_lo: lo,
                    modulus_hi: hi,
                    minimal_polynomial: f.polynomial.clone(),
                });
            } else {
                return Err(SpectralError::Precision(format!(
                    "conjugate {}{:+}i has modulus in [{lo}, {hi}], which straddles the unit circle",
                    r.re, r.im
                )));
            }
        }
    }
    let verdict = if witnesses.is_empty() { PisotVerdict::PisotFamily } else { PisotVerdict::NotPisotFamily };
    Ok(PisotFamilyVerdict { verdict, witnesses, margin, numeric: !spec.exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::int;
    use crate::arithmetic::{AlgebraicScalar, FieldMatrix, NumberField, RationalMatrix};
    use crate::spectral::eigen::spectral_data;
    use num_bigint::BigInt;

    fn scalar_field(c0: i64, lo: i64, hi: i64) -> FieldMatrix {
        let k = NumberField::new(&[BigInt::from(c0), BigInt::from(-1), BigInt::from(1)], int(lo), int(hi)).unwrap();
        FieldMatrix::scalar(&k, AlgebraicScalar::theta(&k), 1)
    }

    #[test]
    fn golden_is_pisot_family() {
        let v = pisot_family_check(&spectral_data(&scalar_field(-1, 1, 2)).unwrap()).unwrap();
        assert_eq!(v.verdict, PisotVerdict::PisotFamily);
    }

    #[test]
    fn thirteen_has_large_conjugate() {
        let v = pisot_family_check(&spectral_data(&scalar_field(-3, 2, 3)).unwrap()).unwrap();
        assert_eq!(v.verdict, PisotVerdict::NotPisotFamily);
        let w = &v.witnesses[0];
        // (1 - sqrt 13)/2
        let expect = (13f64.sqrt() - 1.0) / 2.0;
        assert!(w.modulus_lo <= expect && expect <= w.modulus_hi);
        assert!(w.modulus_hi - w.modulus_lo < 1e-9);
    }

    #[test]
    fn rational_scalar_matrix() {
        let q = FieldMatrix::from_rational(&NumberField::rationals(), &RationalMatrix::from_i64(&[vec![2, 0], vec![0, 2]]));
        let v = pisot_family_check(&spectral_data(&q).unwrap()).unwrap();
        assert_eq!(v.verdict, PisotVerdict::PisotFamily);
    }

    #[test]
    fn both_conjugates_as_eigenvalues() {
        // diag(λ, λ') with λ = (1+√13)/2: every large conjugate is an eigenvalue
        let k = NumberField::new(&[BigInt::from(-3), BigInt::from(-1), BigInt::from(1)], int(2), int(3)).unwrap();
        let lam = AlgebraicScalar::theta(&k);
        let conj = &AlgebraicScalar::one(&k) - &lam;
        let z = AlgebraicScalar::zero(&k);
        let q = FieldMatrix::new(&k, vec![vec![lam, z.clone()], vec![z, conj]]).unwrap();
        let v = pisot_family_check(&spectral_data(&q).unwrap()).unwrap();
        assert_eq!(v.verdict, PisotVerdict::PisotFamily);
    }
}
