//! Integer matrix of Q on a group generated by translation vectors.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arithmetic::lattice::RationalLattice;
use crate::arithmetic::{AlgebraicVector, FieldMatrix, Poly, RationalMatrix};

use super::SpectralError;

#[derive(Clone, Debug, Serialize)]
pub struct IntegerCheck {
    /// Reduced generators (exact power-basis coefficients per entry).
    pub basis: Vec<Vec<Vec<String>>>,
    /// `Q g_j = Σ_i M[j][i] g_i`.
    pub m: Vec<Vec<i64>>,
    pub charpoly_m: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub enum IntegerCheckFailure {
    /// `Q g` lies outside the rational span of the generators.
    OutsideSpan { generator: usize },
    /// `Q g` has a non-integral coordinate.
    NonIntegral { generator: usize, coordinates: Vec<String> },
}

/// Solves `Q N = N M^T` exactly over a reduced basis of the group generated by `gens`.
pub fn algebraic_integer_check(
    gens: &[AlgebraicVector],
    q: &FieldMatrix,
) -> Result<Result<IntegerCheck, IntegerCheckFailure>, SpectralError> {
    let Some(first) = gens.first() else {
        return Err(SpectralError::Rank("no generators".into()));
    };
    let d = q.dim();
    let field = first.field().clone();
    let flats: Vec<Vec<BigRational>> = gens.iter().map(|g| g.flat()).collect();
    let lattice = RationalLattice::from_generators(first.flat().len(), &flats);
    let basis: Vec<AlgebraicVector> = lattice.basis().iter().map(|b| AlgebraicVector::from_flat(&field, b)).collect();
    let real = DMatrix::from_fn(d, basis.len(), |i, j| basis[j].entries()[i].to_f64_accurate());
    if basis.is_empty() || real.rank(1e-9) < d {
        return Err(SpectralError::Rank(format!("generators span less than R^{d}")));
    }
    let n = basis.len();
    let mut m = vec![vec![0i64; n]; n];
    let span = RationalMatrix::from_rows(lattice.basis()).transpose();
    for (j, g) in basis.iter().enumerate() {
        let img = q.apply(g).map_err(|e| SpectralError::Shape(e.to_string()))?;
        let flat = img.flat();
        match lattice.coordinates(&flat) {
            Some(c) => {
                for (i, ci) in c.iter().enumerate() {
                    m[j][i] = ci.to_i64().ok_or_else(|| SpectralError::Numeric("coefficient overflow".into()))?;
                }
            }
            None => {
                return Ok(Err(match span.solve(&flat) {
                    None => IntegerCheckFailure::OutsideSpan { generator: j },
                    Some(c) => IntegerCheckFailure::NonIntegral {
                        generator: j,
                        coordinates: c.iter().map(|x| x.to_string()).collect(),
                    },
                }));
            }
        }
    }
    let cp = RationalMatrix::from_i64(&m).charpoly();
    Ok(Ok(IntegerCheck {
        basis: basis.iter().map(|b| b.coeff_strings()).collect(),
        m,
        charpoly_m: cp.to_strings(),
    }))
}

/// True when `f` divides the characteristic polynomial of the integer matrix `m`.
pub fn charpoly_divisible(m: &[Vec<i64>], f: &Poly) -> bool {
    let cp = RationalMatrix::from_i64(m).charpoly();
    !f.is_zero() && cp.div_rem(f).1.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::{int, rat};
    use crate::arithmetic::{AlgebraicScalar, NumberField};
    use num_bigint::BigInt;

    #[test]
    fn golden_generators() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], int(1), int(2)).unwrap();
        let q = FieldMatrix::scalar(&k, AlgebraicScalar::theta(&k), 1);
        let gens = vec![
            AlgebraicVector::new(vec![AlgebraicScalar::one(&k)]).unwrap(),
            AlgebraicVector::new(vec![AlgebraicScalar::theta(&k)]).unwrap(),
        ];
        let r = algebraic_integer_check(&gens, &q).unwrap().unwrap();
        assert_eq!(r.m, vec![vec![0, 1], vec![1, 1]]);
        assert!(charpoly_divisible(&r.m, &Poly::from_ints([-1, -1, 1])));
    }

    #[test]
    fn integer_and_half_integer_scalars() {
        let q = NumberField::rationals();
        let one = vec![AlgebraicVector::from_rationals(&q, &[int(1)])];
        let two = FieldMatrix::scalar(&q, AlgebraicScalar::from_int(&q, 2), 1);
        assert_eq!(algebraic_integer_check(&one, &two).unwrap().unwrap().m, vec![vec![2]]);
        let half = FieldMatrix::scalar(&q, AlgebraicScalar::from_rational(&q, rat(3, 2)), 1);
        assert!(matches!(
            algebraic_integer_check(&one, &half).unwrap(),
            Err(IntegerCheckFailure::NonIntegral { .. })
        ));
    }
}
