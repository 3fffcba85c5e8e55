use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use super::field::{AlgebraicScalar, NumberField};
use super::ArithmeticError;

/// Point of `R^d` with coordinates in one number field.
#[derive(Clone)]
pub struct AlgebraicVector {
    field: Arc<NumberField>,
    entries: Vec<AlgebraicScalar>,
}

impl AlgebraicVector {
    pub fn new(entries: Vec<AlgebraicScalar>) -> Result<Self, ArithmeticError> {
        let Some(first) = entries.first() else {
            return Err(ArithmeticError::Shape("vector must have at least one entry".into()));
        };
        let field = first.field().clone();
        for e in &entries {
            first.check_context(e)?;
        }
        Ok(AlgebraicVector { field, entries })
    }

    pub(crate) fn new_unchecked(field: Arc<NumberField>, entries: Vec<AlgebraicScalar>) -> Self {
        AlgebraicVector { field, entries }
    }

    pub fn zero(field: &Arc<NumberField>, d: usize) -> Self {
        AlgebraicVector { field: field.clone(), entries: vec![AlgebraicScalar::zero(field); d] }
    }

    pub fn from_rationals(field: &Arc<NumberField>, xs: &[BigRational]) -> Self {
        AlgebraicVector {
            field: field.clone(),
            entries: xs.iter().map(|x| AlgebraicScalar::from_rational(field, x.clone())).collect(),
        }
    }

    /// Builds a vector from the stacked coordinates `x[i*s + j]` (θ^j coefficient of entry i).
    pub fn from_flat(field: &Arc<NumberField>, flat: &[BigRational]) -> Self {
        let s = field.degree();
        AlgebraicVector {
            field: field.clone(),
            entries: flat.chunks(s).map(|c| AlgebraicScalar::from_coeffs(field, c.to_vec())).collect(),
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[AlgebraicScalar] {
        &self.entries
    }

    /// Stacked power-basis coordinates, length `d·s`.
    pub fn flat(&self) -> Vec<BigRational> {
        self.entries.iter().flat_map(|e| e.coeffs().iter().cloned()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &AlgebraicVector) -> AlgebraicVector {
        AlgebraicVector {
            field: self.field.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &AlgebraicVector) -> AlgebraicVector {
        AlgebraicVector {
            field: self.field.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> AlgebraicVector {
        AlgebraicVector { field: self.field.clone(), entries: self.entries.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, c: &AlgebraicScalar) -> AlgebraicVector {
        AlgebraicVector { field: self.field.clone(), entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn dot(&self, other: &AlgebraicVector) -> AlgebraicScalar {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(AlgebraicScalar::zero(&self.field), |acc, (a, b)| &acc + &(a * b))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.to_f64()).collect()
    }

    pub fn to_f64_accurate(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.to_f64_accurate()).collect()
    }

    pub fn norm_f64(&self) -> f64 {
        self.to_f64_accurate().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Exact lexicographic comparison.
    pub fn lex_cmp(&self, other: &AlgebraicVector) -> Ordering {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            match a.exact_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.dim().cmp(&other.dim())
    }

    pub fn coeff_strings(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|e| e.coeff_strings()).collect()
    }
}

impl PartialEq for AlgebraicVector {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for AlgebraicVector {}

impl std::hash::Hash for AlgebraicVector {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.entries.hash(state);
    }
}

impl PartialOrd for AlgebraicVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

impl fmt::Debug for AlgebraicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::int;
    use num_bigint::BigInt;

    #[test]
    fn lexicographic_order_is_exact() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], int(1), int(2)).unwrap();
        let phi = AlgebraicScalar::theta(&k);
        let a = AlgebraicVector::new(vec![phi.clone(), AlgebraicScalar::zero(&k)]).unwrap();
        let b = AlgebraicVector::new(vec![AlgebraicScalar::from_int(&k, 2), AlgebraicScalar::zero(&k)]).unwrap();
        assert_eq!(a.lex_cmp(&b), Ordering::Less);
        assert_eq!(AlgebraicVector::from_flat(&k, &a.flat()), a);
    }

    #[test]
    fn mixed_contexts_rejected() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], int(1), int(2)).unwrap();
        let q = NumberField::rationals();
        assert!(AlgebraicVector::new(vec![AlgebraicScalar::one(&k), AlgebraicScalar::one(&q)]).is_err());
    }
}
