//! Exact matrices over `Q` and over a number field `Q(θ)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{AlgebraicScalar, NumberField};
use super::poly::Poly;
use super::vector::AlgebraicVector;
use super::ArithmeticError;

/// Minimal ring interface for division-free algorithms.
pub trait RingElem: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

impl RingElem for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl RingElem for AlgebraicScalar {
    fn zero_like(&self) -> Self {
        AlgebraicScalar::zero(self.field())
    }
    fn one_like(&self) -> Self {
        AlgebraicScalar::one(self.field())
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        AlgebraicScalar::neg(self)
    }
}

/// Berkowitz's division-free characteristic polynomial `det(xI - A)`.
/// Returns coefficients constant term first; `one` fixes the ring context.
pub fn berkowitz<T: RingElem>(a: &[Vec<T>], one: &T) -> Vec<T> {
    let n = a.len();
    let zero = one.zero_like();
    // v holds coefficients, highest degree first
    let mut v = vec![one.clone()];
    for r in 0..n {
        let mut t = Vec::with_capacity(r + 2);
        t.push(one.clone());
        t.push(a[r][r].neg_ref());
        // M^k R for k = 0..r-1, where M = a[0..r][0..r], R = a[0..r][r]
        let mut mk_r: Vec<T> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let c_dot = (0..r).fold(zero.clone(), |acc, j| acc.add_ref(&a[r][j].mul_ref(&mk_r[j])));
            t.push(c_dot.neg_ref());
            mk_r = (0..r)
                .map(|i| (0..r).fold(zero.clone(), |acc, j| acc.add_ref(&a[i][j].mul_ref(&mk_r[j]))))
                .collect();
        }
        let mut next = vec![zero.clone(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = zero.clone();
            for (j, vj) in v.iter().enumerate() {
                if i >= j && i - j < t.len() {
                    acc = acc.add_ref(&t[i - j].mul_ref(vj));
                }
            }
            *slot = acc;
        }
        v = next;
    }
    v.reverse();
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        RationalMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RationalMatrix) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> RationalMatrix {
        RationalMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn pow(&self, e: u32) -> RationalMatrix {
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Entries as `i64` when all are integers that fit.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
                    .collect()
            })
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = BigRational::one() / m.get(r, c);
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A solution of `A x = b`, or `None` when inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<RationalMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, BigRational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> BigRational {
        let cp = self.charpoly();
        let n = self.rows;
        let c0 = cp.coeff(0);
        if n % 2 == 0 {
            c0
        } else {
            -c0
        }
    }

    /// Exact characteristic polynomial `det(xI - A)`.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square(), "charpoly of a non-square matrix");
        Poly::new(berkowitz(&self.to_rows(), &BigRational::one()))
    }

    /// Evaluates a polynomial at this matrix.
    pub fn eval_poly(&self, p: &Poly) -> RationalMatrix {
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Self::identity(n).scale(c));
        }
        acc
    }
}

/// Square matrix with entries in a number field, such as the expansion map.
#[derive(Clone, Debug)]
pub struct FieldMatrix {
    field: Arc<NumberField>,
    n: usize,
    data: Vec<AlgebraicScalar>,
}

impl PartialEq for FieldMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data == other.data
    }
}

impl FieldMatrix {
    pub fn new(field: &Arc<NumberField>, rows: Vec<Vec<AlgebraicScalar>>) -> Result<Self, ArithmeticError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(ArithmeticError::Shape("expansion must be a non-empty square matrix".into()));
        }
        for e in rows.iter().flatten() {
            if !e.field().same_as(field) {
                return Err(ArithmeticError::Context {
                    left: field.minpoly().to_string(),
                    right: e.field().minpoly().to_string(),
                });
            }
        }
        Ok(FieldMatrix { field: field.clone(), n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_rational(field: &Arc<NumberField>, m: &RationalMatrix) -> Self {
        assert!(m.is_square());
        let data = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| AlgebraicScalar::from_rational(field, m.get(i, j).clone()))
            .collect();
        FieldMatrix { field: field.clone(), n: m.rows(), data }
    }

    pub fn scalar(field: &Arc<NumberField>, s: AlgebraicScalar, n: usize) -> Self {
        let data = (0..n * n)
            .map(|k| if k / n == k % n { s.clone() } else { AlgebraicScalar::zero(field) })
            .collect();
        FieldMatrix { field: field.clone(), n, data }
    }

    pub fn identity(field: &Arc<NumberField>, n: usize) -> Self {
        Self::scalar(field, AlgebraicScalar::one(field), n)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &AlgebraicScalar {
        &self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<AlgebraicScalar>> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn mul(&self, other: &FieldMatrix) -> FieldMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = AlgebraicScalar::zero(&self.field);
                for k in 0..n {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                data.push(acc);
            }
        }
        FieldMatrix { field: self.field.clone(), n, data }
    }

    pub fn sub(&self, other: &FieldMatrix) -> FieldMatrix {
        FieldMatrix {
            field: self.field.clone(),
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> FieldMatrix {
        let mut acc = Self::identity(&self.field, self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn apply(&self, v: &AlgebraicVector) -> Result<AlgebraicVector, ArithmeticError> {
        if v.dim() != self.n {
            return Err(ArithmeticError::Shape(format!("vector of dimension {} for a {}x{} matrix", v.dim(), self.n, self.n)));
        }
        if !v.field().same_as(&self.field) {
            return Err(ArithmeticError::Context {
                left: self.field.minpoly().to_string(),
                right: v.field().minpoly().to_string(),
            });
        }
        let entries = (0..self.n)
            .map(|i| {
                (0..self.n).fold(AlgebraicScalar::zero(&self.field), |acc, j| &acc + &(self.get(i, j) * &v.entries()[j]))
            })
            .collect();
        Ok(AlgebraicVector::new_unchecked(self.field.clone(), entries))
    }

    /// Rational matrix of the map on `Q^(d·s)` coordinates, where coordinate
    /// `i*s + j` is the `θ^j` coefficient of entry `i`.
    pub fn regular_representation(&self) -> RationalMatrix {
        let s = self.field.degree();
        let n = self.n;
        let mut m = RationalMatrix::zeros(n * s, n * s);
        for i in 0..n {
            for l in 0..n {
                let block = self.get(i, l).multiplication_matrix();
                for (a, row) in block.iter().enumerate() {
                    for (b, v) in row.iter().enumerate() {
                        m.set(i * s + a, l * s + b, v.clone());
                    }
                }
            }
        }
        m
    }

    /// True when every entry lies in `Z[θ]`.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integral_in_basis())
    }

    pub fn is_rational(&self) -> bool {
        self.data.iter().all(|x| x.is_rational())
    }

    pub fn to_rational(&self) -> Option<RationalMatrix> {
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).as_rational()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(RationalMatrix::from_rows(rows))
    }

    /// Real matrix at the designated embedding of θ.
    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64_accurate())
    }

    /// Characteristic polynomial over the field, constant term first.
    pub fn charpoly_over_field(&self) -> Vec<AlgebraicScalar> {
        berkowitz(&self.rows(), &AlgebraicScalar::one(&self.field))
    }

    /// Exact determinant in the field.
    pub fn determinant(&self) -> AlgebraicScalar {
        let cp = self.charpoly_over_field();
        if self.n % 2 == 0 {
            cp[0].clone()
        } else {
            cp[0].neg()
        }
    }

    /// Exact rank over the field.
    pub fn rank(&self) -> usize {
        let mut m = self.rows();
        let n = self.n;
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(p, r);
            let inv = m[r][c].inv().expect("nonzero pivot");
            for i in r + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let v = &m[i][j] - &(&f * &m[r][j]);
                    m[i][j] = v;
                }
            }
            r += 1;
        }
        r
    }

    pub fn entry_strings(&self) -> Vec<Vec<String>> {
        self.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Integer matrix as nested `i64` rows; used where entries are known integral.
pub fn det_sign(m: &RationalMatrix) -> i8 {
    let d = m.determinant();
    if d.is_positive() {
        1
    } else if d.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::int;

    #[test]
    fn charpoly_jordan_block() {
        let q = RationalMatrix::from_i64(&[vec![2, 1], vec![0, 2]]);
        assert_eq!(q.charpoly(), Poly::from_ints([4, -4, 1]));
    }

    #[test]
    fn charpoly_identity_three() {
        let p = RationalMatrix::identity(3).charpoly();
        assert_eq!(p, Poly::from_ints([-1, 1]).pow(3));
    }

    #[test]
    fn cayley_hamilton() {
        let q = RationalMatrix::from_i64(&[vec![1, 2, 0], vec![3, -1, 4], vec![0, 5, 2]]);
        assert!(q.eval_poly(&q.charpoly()).is_zero());
    }

    #[test]
    fn solve_inverse_nullspace() {
        let a = RationalMatrix::from_i64(&[vec![2, 1], vec![1, 1]]);
        let x = a.solve(&[int(3), int(2)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RationalMatrix::identity(2));
        let s = RationalMatrix::from_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(s.rank(), 1);
        assert!(s.inverse().is_none());
        let ns = s.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(s.mul_vec(&ns[0]).iter().all(|v| v.is_zero()));
        assert_eq!(s.solve(&[int(1), int(0)]), None);
    }

    #[test]
    fn golden_regular_representation() {
        let k = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::one()], int(1), int(2)).unwrap();
        let q = FieldMatrix::scalar(&k, AlgebraicScalar::theta(&k), 1);
        let reg = q.regular_representation();
        assert_eq!(reg, RationalMatrix::from_i64(&[vec![0, 1], vec![1, 1]]));
        assert_eq!(reg.charpoly(), Poly::from_ints([-1, -1, 1]));
        let cp = q.charpoly_over_field();
        assert_eq!(cp[1], AlgebraicScalar::one(&k));
        assert_eq!(cp[0], AlgebraicScalar::theta(&k).neg());
    }
}
