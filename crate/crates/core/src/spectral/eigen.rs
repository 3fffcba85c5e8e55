//! Characteristic polynomial, factorization and eigenvalue data of an expansion map.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::arithmetic::factor::{factor, Factorization};
use crate::arithmetic::kpoly::FieldPoly;
use crate::arithmetic::roots::{certified_roots, CertifiedRoot};
use crate::arithmetic::{AlgebraicScalar, FieldMatrix, Poly, RationalMatrix};

use super::SpectralError;

/// Rank threshold for numeric Jordan structure.
pub const NUMERIC_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    /// Certified radius of a disc around `(re, im)` containing the eigenvalue.
    pub radius: f64,
    pub multiplicity: usize,
    /// Index into the factor list of the characteristic polynomial.
    pub factor: usize,
    /// Jordan block sizes, descending.
    pub jordan_blocks: Vec<usize>,
    /// True when the block sizes came from exact rank computations.
    pub jordan_exact: bool,
}

impl Eigenvalue {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus_bounds(&self) -> (f64, f64) {
        let m = self.z().norm();
        ((m - self.radius).max(0.0), m + self.radius)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorRoots {
    pub polynomial: Vec<String>,
    pub multiplicity: usize,
    pub roots: Vec<CertifiedRoot>,
    /// For each root, whether it is an eigenvalue of Q at the designated embedding.
    pub is_eigenvalue: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralData {
    pub dimension: usize,
    /// Characteristic polynomial of Q acting on the rational coordinate space.
    #[serde(serialize_with = "ser_poly")]
    pub charpoly: Poly,
    pub factorization: Factorization,
    pub factors: Vec<FactorRoots>,
    pub eigenvalues: Vec<Eigenvalue>,
    /// Largest Jordan block size minus one.
    pub k: usize,
    /// Eigenvalue indices grouped by shared minimal polynomial.
    pub conjugate_classes: Vec<Vec<usize>>,
    /// False when factorization fell back to numeric mode.
    pub exact: bool,
}

fn ser_poly<S: serde::Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.to_strings())
}

/// Exact characteristic polynomial of Q on `Q^(d·s)`. For a rational matrix
/// this is the usual characteristic polynomial; for `Q = [θ]` it is the
/// minimal polynomial of θ.
pub fn char_poly(q: &FieldMatrix) -> Poly {
    q.regular_representation().charpoly()
}

pub fn char_poly_rational(q: &RationalMatrix) -> Poly {
    q.charpoly()
}

pub fn factor_charpoly(p: &Poly) -> Factorization {
    factor(p)
}

fn root_of(num: Complex64, a: &FieldPoly, b: &FieldPoly) -> bool {
    // z is a root of exactly one of a, b (coprime); pick the smaller relative value
    let scale = |p: &FieldPoly| {
        p.coeffs().iter().rev().fold(0.0, |acc, c| acc * num.norm().max(1.0) + c.to_f64().abs()).max(1e-300)
    };
    let va = a.eval_complex(num).norm() / scale(a);
    let vb = b.eval_complex(num).norm() / scale(b);
    va < vb
}

/// Eigenvalue data of Q at the designated real embedding of its field.
pub fn spectral_data(q: &FieldMatrix) -> Result<SpectralData, SpectralError> {
    let field = q.field().clone();
    let d = q.dim();
    let charpoly = char_poly(q);
    let factorization = factor_charpoly(&charpoly);
    let p_k = FieldPoly::new(&field, q.charpoly_over_field());
    let mut factors = Vec::new();
    let mut eigenvalues = Vec::new();
    for (fi, (f, mult)) in factorization.factors.iter().enumerate() {
        let roots = certified_roots(f).ok_or_else(|| SpectralError::Precision(format!("roots of {f} not separated")))?;
        let f_k = FieldPoly::from_rational(&field, f);
        // successive gcds give per-root multiplicities in p_K
        let mut hs = Vec::new();
        let mut rest = p_k.clone();
        loop {
            let h = rest.gcd(&f_k);
            if h.degree().unwrap_or(0) == 0 {
                break;
            }
            rest = rest.div_rem(&h).0;
            hs.push(h);
        }
        let mut is_eig = Vec::with_capacity(roots.len());
        for r in &roots {
            let z = r.z();
            let mut m = 0;
            for h in &hs {
                let cof = f_k.div_rem(h).0;
                if h.degree() == f_k.degree() || root_of(z, h, &cof) {
                    m += 1;
                } else {
                    break;
                }
            }
            is_eig.push(m > 0);
            if m > 0 {
                let exact_lambda = exact_eigenvalue(&hs[0], &f_k, z);
                let (blocks, exact) = jordan_blocks(q, z, m, exact_lambda.as_ref());
                eigenvalues.push(Eigenvalue {
                    re: r.re,
                    im: r.im,
                    radius: r.radius,
                    multiplicity: m,
                    factor: fi,
                    jordan_blocks: blocks,
                    jordan_exact: exact,
                });
            }
        }
        factors.push(FactorRoots { polynomial: f.to_strings(), multiplicity: *mult, roots, is_eigenvalue: is_eig });
    }
    let total: usize = eigenvalues.iter().map(|e| e.multiplicity).sum();
    if total != d {
        return Err(SpectralError::Precision(format!(
            "eigenvalue multiplicities sum to {total}, expected {d}"
        )));
    }
    let k = eigenvalues.iter().flat_map(|e| e.jordan_blocks.iter()).max().copied().unwrap_or(1) - 1;
    let mut conjugate_classes: Vec<Vec<usize>> = vec![Vec::new(); factors.len()];
    for (i, e) in eigenvalues.iter().enumerate() {
        conjugate_classes[e.factor].push(i);
    }
    conjugate_classes.retain(|c| !c.is_empty());
    Ok(SpectralData {
        dimension: d,
        charpoly,
        exact: factorization.exact,
        factorization,
        factors,
        eigenvalues,
        k,
        conjugate_classes,
    })
}

/// The eigenvalue as an exact field element when it has a linear factor over the field.
fn exact_eigenvalue(h: &FieldPoly, f_k: &FieldPoly, z: Complex64) -> Option<AlgebraicScalar> {
    let cands: Vec<&FieldPoly> = [h, f_k].into_iter().filter(|p| p.degree() == Some(1)).collect();
    for p in cands {
        let lam = p.monic().coeffs()[0].neg();
        if (lam.to_f64_accurate() - z.re).abs() <= 1e-9 * (1.0 + z.norm()) && z.im == 0.0 {
            return Some(lam);
        }
    }
    None
}

fn jordan_blocks(q: &FieldMatrix, z: Complex64, mult: usize, exact: Option<&AlgebraicScalar>) -> (Vec<usize>, bool) {
    let d = q.dim();
    if mult == 1 {
        return (vec![1], true);
    }
    let mut ranks = vec![d];
    let exact_mode = exact.is_some();
    if let Some(lam) = exact {
        let shifted = q.sub(&FieldMatrix::scalar(q.field(), lam.clone(), d));
        let mut pow = shifted.clone();
        for _ in 0..mult {
            ranks.push(pow.rank());
            if ranks[ranks.len() - 1] == d - mult {
                break;
            }
            pow = pow.mul(&shifted);
        }
    } else {
        let qf = q.to_f64().map(|x| Complex64::new(x, 0.0));
        let shifted = qf - DMatrix::<Complex64>::identity(d, d) * z;
        let mut pow = shifted.clone();
        for _ in 0..mult {
            let sv = pow.clone().svd(false, false).singular_values;
            let top = sv.iter().cloned().fold(1.0, f64::max);
            let r = sv.iter().filter(|&&s| s > NUMERIC_RANK_TOL * top).count();
            ranks.push(r);
            if r <= d - mult {
                break;
            }
            pow = &pow * &shifted;
        }
    }
    // number of blocks of size >= k is ranks[k-1] - ranks[k]
    let mut at_least: Vec<usize> = ranks.windows(2).map(|w| w[0].saturating_sub(w[1])).collect();
    at_least.push(0);
    let mut blocks = Vec::new();
    for k in 1..at_least.len() {
        let exactly = at_least[k - 1].saturating_sub(at_least[k]);
        blocks.extend(std::iter::repeat(k).take(exactly));
    }
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    if blocks.iter().sum::<usize>() != mult {
        // numeric rank disagreed with the algebraic multiplicity
        return (vec![1; mult], false);
    }
    (blocks, exact_mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::int;
    use crate::arithmetic::NumberField;
    use num_bigint::BigInt;

    fn rational(rows: &[Vec<i64>]) -> FieldMatrix {
        FieldMatrix::from_rational(&NumberField::rationals(), &RationalMatrix::from_i64(rows))
    }

    #[test]
    fn jordan_block_two() {
        let s = spectral_data(&rational(&[vec![2, 1], vec![0, 2]])).unwrap();
        assert_eq!(s.charpoly, Poly::from_ints([4, -4, 1]));
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.eigenvalues[0].jordan_blocks, vec![2]);
        assert!(s.eigenvalues[0].jordan_exact);
        assert_eq!(s.k, 1);
    }

    #[test]
    fn scalar_identity_blocks() {
        let s = spectral_data(&rational(&[vec![2, 0], vec![0, 2]])).unwrap();
        assert_eq!(s.eigenvalues[0].multiplicity, 2);
        assert_eq!(s.eigenvalues[0].jordan_blocks, vec![1, 1]);
        assert_eq!(s.k, 0);
    }

    #[test]
    fn golden_scalar_has_one_eigenvalue() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], int(1), int(2)).unwrap();
        let q = FieldMatrix::scalar(&k, AlgebraicScalar::theta(&k), 1);
        let s = spectral_data(&q).unwrap();
        assert_eq!(s.charpoly, Poly::from_ints([-1, -1, 1]));
        assert_eq!(s.eigenvalues.len(), 1);
        assert!((s.eigenvalues[0].re - 1.618_033_988_749_895).abs() < 1e-12);
        assert_eq!(s.factors[0].roots.len(), 2);
        assert_eq!(s.factors[0].is_eigenvalue.iter().filter(|b| **b).count(), 1);
    }

    #[test]
    fn repeated_conjugates_with_different_multiplicities() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], int(1), int(2)).unwrap();
        let phi = AlgebraicScalar::theta(&k);
        let psi = &AlgebraicScalar::one(&k) - &phi;
        let z = AlgebraicScalar::zero(&k);
        let q = FieldMatrix::new(
            &k,
            vec![vec![phi.clone(), z.clone(), z.clone()], vec![z.clone(), phi.clone(), z.clone()], vec![z.clone(), z, psi]],
        )
        .unwrap();
        let s = spectral_data(&q).unwrap();
        let mut mults: Vec<usize> = s.eigenvalues.iter().map(|e| e.multiplicity).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 2]);
    }
}
