//! Univariate polynomials with coefficients in a number field.

use std::sync::Arc;

use num_complex::Complex64;

use super::field::{AlgebraicScalar, NumberField};
use super::poly::Poly;

#[derive(Clone, Debug)]
pub struct FieldPoly {
    field: Arc<NumberField>,
    /// Constant term first, no trailing zeros.
    coeffs: Vec<AlgebraicScalar>,
}

impl PartialEq for FieldPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl FieldPoly {
    pub fn new(field: &Arc<NumberField>, mut coeffs: Vec<AlgebraicScalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FieldPoly { field: field.clone(), coeffs }
    }

    pub fn from_rational(field: &Arc<NumberField>, p: &Poly) -> Self {
        Self::new(field, p.coeffs().iter().map(|c| AlgebraicScalar::from_rational(field, c.clone())).collect())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[AlgebraicScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn monic(&self) -> FieldPoly {
        let Some(lc) = self.coeffs.last() else { return self.clone() };
        let inv = lc.inv().expect("nonzero leading coefficient");
        FieldPoly::new(&self.field, self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn div_rem(&self, divisor: &FieldPoly) -> (FieldPoly, FieldPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let inv = divisor.coeffs[dd].inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let zero = AlgebraicScalar::zero(&self.field);
        if rem.len() <= dd {
            return (FieldPoly::new(&self.field, Vec::new()), self.clone());
        }
        let mut quot = vec![zero; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * dc);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (FieldPoly::new(&self.field, quot), FieldPoly::new(&self.field, rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &FieldPoly) -> FieldPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64_accurate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::int;
    use num_bigint::BigInt;

    #[test]
    fn splits_minpoly_over_its_field() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], int(1), int(2)).unwrap();
        let f = FieldPoly::from_rational(&k, &Poly::from_ints([-1, -1, 1]));
        let phi = AlgebraicScalar::theta(&k);
        let lin = FieldPoly::new(&k, vec![phi.neg(), AlgebraicScalar::one(&k)]);
        let (q, r) = f.div_rem(&lin);
        assert!(r.is_zero());
        // cofactor is x - (1 - φ)
        assert_eq!(q.coeffs()[0], (&phi - &AlgebraicScalar::one(&k)));
        assert_eq!(f.gcd(&lin), lin);
    }
}
