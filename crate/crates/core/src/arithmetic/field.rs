//! Real number fields `Q(θ)` and exact scalars in them.
//!
//! A [`NumberField`] is the real embedding of `Q[x]/(m)` selected by an
//! isolating interval of the real root θ of the monic integer polynomial `m`.
//! An [`AlgebraicScalar`] is a coefficient vector in the power basis
//! `1, θ, …, θ^(s-1)`; ring operations reduce modulo `m`. Signs are decided
//! by evaluating the coefficient polynomial over successively refined
//! enclosures of θ, with an exact gcd-based zero test as the backstop.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::{int, parse_rational, Interval};
use super::ArithmeticError;

/// Minimal-polynomial degree above which factor-dependent computations run in
/// numeric mode.
pub const EXACT_DEGREE_CAP: usize = 6;

pub struct NumberField {
    minpoly: Poly,
    interval: Interval,
    enclosure: Mutex<(u32, Interval)>,
    theta_f64: f64,
    powers_f64: Vec<f64>,
    irreducible: Option<bool>,
    reduction: Vec<Vec<BigRational>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("minpoly", &self.minpoly.to_string())
            .field("theta", &self.theta_f64)
            .finish()
    }
}

/// Serializable description of a field, as it appears in system configs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub minpoly: Vec<String>,
    pub root_interval: [String; 2],
}

impl NumberField {
    /// Builds `Q(θ)` from `[c0, …, c_{s-1}, 1]` and an interval that isolates θ.
    pub fn new(minpoly: &[BigInt], lo: BigRational, hi: BigRational) -> Result<Arc<Self>, ArithmeticError> {
        let poly = Poly::from_bigints(minpoly);
        let Some(deg) = poly.degree() else {
            return Err(ArithmeticError::InvalidField("minpoly is zero".into()));
        };
        if deg == 0 {
            return Err(ArithmeticError::InvalidField("minpoly is constant".into()));
        }
        if !poly.is_monic() {
            return Err(ArithmeticError::InvalidField("minpoly not monic".into()));
        }
        if lo > hi {
            return Err(ArithmeticError::InvalidField("root_interval has lo > hi".into()));
        }
        let at_lo = poly.eval(&lo).is_zero();
        let count = poly.sturm_count(&lo, &hi) + usize::from(at_lo);
        if count != 1 {
            return Err(ArithmeticError::InvalidField(format!(
                "root_interval [{lo}, {hi}] contains {count} roots of {poly}, expected exactly one"
            )));
        }
        let irreducible = super::factor::is_irreducible(&poly);
        if irreducible == Some(false) {
            return Err(ArithmeticError::InvalidField(format!("minpoly {poly} is reducible over Q")));
        }
        let start = if deg == 1 {
            Interval::point(-poly.coeff(0))
        } else {
            Interval::new(lo.clone(), hi.clone())
        };
        let mut field = NumberField {
            minpoly: poly,
            interval: Interval::new(lo, hi),
            enclosure: Mutex::new((0, start)),
            theta_f64: 0.0,
            powers_f64: Vec::new(),
            irreducible,
            reduction: Vec::new(),
        };
        field.reduction = field.build_reduction();
        let enc = field.theta_enclosure(80);
        let theta = enc.midpoint().to_f64().unwrap_or(f64::NAN);
        field.theta_f64 = theta;
        field.powers_f64 = (0..deg).map(|j| theta.powi(j as i32)).collect();
        Ok(Arc::new(field))
    }

    /// `Q` itself, presented as `Q(θ)` with θ = 0 the root of `x`.
    pub fn rationals() -> Arc<Self> {
        static Q: OnceLock<Arc<NumberField>> = OnceLock::new();
        Q.get_or_init(|| {
            NumberField::new(&[BigInt::zero(), BigInt::one()], int(-1), int(1)).expect("x has root 0")
        })
        .clone()
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Arc<Self>, ArithmeticError> {
        let coeffs = spec
            .minpoly
            .iter()
            .map(|c| {
                let r = parse_rational(c)?;
                if !r.is_integer() {
                    return Err(ArithmeticError::InvalidField(format!("minpoly coefficient {c} is not an integer")));
                }
                Ok(r.to_integer())
            })
            .collect::<Result<Vec<_>, _>>()?;
        let lo = parse_rational(&spec.root_interval[0])?;
        let hi = parse_rational(&spec.root_interval[1])?;
        NumberField::new(&coeffs, lo, hi)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            minpoly: self.minpoly.coeffs().iter().map(|c| c.to_string()).collect(),
            root_interval: [self.interval.lo.to_string(), self.interval.hi.to_string()],
        }
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap()
    }

    pub fn minpoly(&self) -> &Poly {
        &self.minpoly
    }

    pub fn root_interval(&self) -> &Interval {
        &self.interval
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    /// `None` when the degree exceeds [`EXACT_DEGREE_CAP`] and irreducibility
    /// was not certified.
    pub fn irreducible(&self) -> Option<bool> {
        self.irreducible
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta_f64
    }

    pub fn powers_f64(&self) -> &[f64] {
        &self.powers_f64
    }

    /// Same field (identical minimal polynomial and isolating interval).
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || (self.minpoly == other.minpoly && self.same_root(other))
    }

    fn same_root(&self, other: &NumberField) -> bool {
        if self.interval == other.interval {
            return true;
        }
        let a = self.theta_enclosure(64);
        let b = other.theta_enclosure(64);
        a.lo <= b.hi && b.lo <= a.hi
    }

    /// Enclosure of θ of width at most `2^-bits` (a point for rational θ).
    pub fn theta_enclosure(&self, bits: u32) -> Interval {
        let mut guard = self.enclosure.lock().expect("enclosure lock");
        if self.minpoly.degree() == Some(1) || guard.0 >= bits {
            return guard.1.clone();
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let mut iv = guard.1.clone();
        let sign_lo = self.minpoly.eval(&iv.lo).signum();
        while iv.width() > target {
            let mid = iv.midpoint();
            let s = self.minpoly.eval(&mid);
            if s.is_zero() {
                iv = Interval::point(mid);
                break;
            }
            if s.signum() == sign_lo {
                iv.lo = mid;
            } else {
                iv.hi = mid;
            }
        }
        *guard = (bits, iv.clone());
        iv
    }

    fn build_reduction(&self) -> Vec<Vec<BigRational>> {
        // θ^(s+k) expressed in the power basis, k = 0..s-1
        let s = self.degree();
        let mut out = Vec::with_capacity(s);
        let mut cur: Vec<BigRational> = (0..s).map(|j| -self.minpoly.coeff(j)).collect();
        for _ in 0..s {
            out.push(cur.clone());
            let top = cur[s - 1].clone();
            let mut next = vec![BigRational::zero(); s];
            for j in 1..s {
                next[j] = cur[j - 1].clone();
            }
            if !top.is_zero() {
                for j in 0..s {
                    next[j] -= &top * self.minpoly.coeff(j);
                }
            }
            cur = next;
        }
        out
    }

    /// Integer companion matrix of multiplication by θ, when the minimal polynomial
    /// is integral (always, by construction). Row-major, acting on coefficient columns.
    pub fn companion(&self) -> Vec<Vec<BigRational>> {
        let s = self.degree();
        let mut m = vec![vec![BigRational::zero(); s]; s];
        for j in 0..s {
            // column j: θ·θ^j
            if j + 1 < s {
                m[j + 1][j] = BigRational::one();
            } else {
                for (i, row) in m.iter_mut().enumerate() {
                    row[j] = -self.minpoly.coeff(i);
                }
            }
        }
        m
    }
}

/// Exact element of a real number field.
#[derive(Clone)]
pub struct AlgebraicScalar {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

/// A float approximation together with a rigorous error bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Approximation {
    pub value: f64,
    pub error_bound: f64,
    #[serde(skip)]
    pub midpoint: BigRational,
}

/// Binary operations exposed by [`scalar_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
}

/// Context-checked scalar arithmetic.
pub fn scalar_arith(a: &AlgebraicScalar, b: &AlgebraicScalar, op: ScalarOp) -> Result<AlgebraicScalar, ArithmeticError> {
    a.check_context(b)?;
    Ok(match op {
        ScalarOp::Add => a.add_unchecked(b),
        ScalarOp::Sub => a.sub_unchecked(b),
        ScalarOp::Mul => a.mul_unchecked(b),
    })
}

impl AlgebraicScalar {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        AlgebraicScalar { field: field.clone(), coeffs: vec![BigRational::zero(); field.degree()] }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, r: BigRational) -> Self {
        let mut s = Self::zero(field);
        s.coeffs[0] = r;
        s
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, int(n))
    }

    /// The generator θ.
    pub fn theta(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, &Poly::x())
    }

    /// Reduces an arbitrary-length coefficient vector modulo the minimal polynomial.
    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Self {
        Self::from_poly(field, &Poly::new(coeffs))
    }

    pub fn from_poly(field: &Arc<NumberField>, p: &Poly) -> Self {
        let r = p.rem(field.minpoly());
        let s = field.degree();
        AlgebraicScalar { field: field.clone(), coeffs: (0..s).map(|i| r.coeff(i)).collect() }
    }

    pub fn from_coeff_strings(field: &Arc<NumberField>, coeffs: &[String]) -> Result<Self, ArithmeticError> {
        let c = coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(field, c))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn as_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn check_context(&self, other: &AlgebraicScalar) -> Result<(), ArithmeticError> {
        if self.field.same_as(&other.field) {
            Ok(())
        } else {
            Err(ArithmeticError::Context {
                left: self.field.minpoly().to_string(),
                right: other.field.minpoly().to_string(),
            })
        }
    }

    fn add_unchecked(&self, other: &AlgebraicScalar) -> AlgebraicScalar {
        AlgebraicScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub_unchecked(&self, other: &AlgebraicScalar) -> AlgebraicScalar {
        AlgebraicScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul_unchecked(&self, other: &AlgebraicScalar) -> AlgebraicScalar {
        let s = self.coeffs.len();
        let mut wide = vec![BigRational::zero(); 2 * s - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        let mut out: Vec<BigRational> = wide[..s].to_vec();
        for (k, c) in wide[s..].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, r) in self.field.reduction[k].iter().enumerate() {
                out[j] += c * r;
            }
        }
        AlgebraicScalar { field: self.field.clone(), coeffs: out }
    }

    pub fn neg(&self) -> AlgebraicScalar {
        AlgebraicScalar { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, r: &BigRational) -> AlgebraicScalar {
        AlgebraicScalar { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<AlgebraicScalar> {
        if self.is_zero() {
            return None;
        }
        let (g, s, _) = self.as_poly().ext_gcd(self.field.minpoly());
        if g.degree() != Some(0) {
            // only reachable with an uncertified reducible minpoly
            return None;
        }
        Some(Self::from_poly(&self.field, &s))
    }

    pub fn pow(&self, e: u32) -> AlgebraicScalar {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Interval enclosure of the value using a θ enclosure of `bits` bits.
    pub fn enclose(&self, bits: u32) -> Interval {
        let theta = self.field.theta_enclosure(bits);
        self.as_poly().eval_interval(&theta)
    }

    /// Exact sign in `{-1, 0, 1}`.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if self.field.is_rational() {
            return if self.coeffs[0].is_positive() { 1 } else { -1 };
        }
        let mut bits = 64;
        loop {
            if let Some(s) = self.enclose(bits).sign() {
                return s;
            }
            if bits >= 512 && self.exact_zero_test() {
                return 0;
            }
            bits *= 2;
        }
    }

    // θ is a root of the coefficient polynomial iff it is a root of its gcd
    // with the minimal polynomial.
    fn exact_zero_test(&self) -> bool {
        let g = self.as_poly().gcd(self.field.minpoly());
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let iv = self.field.root_interval();
        g.eval(&iv.lo).is_zero() || g.sturm_count(&iv.lo, &iv.hi) > 0
    }

    /// Approximation within `2^-precision` (plus the final f64 rounding, which
    /// is included in the reported bound).
    pub fn embed_float(&self, precision: u32) -> Approximation {
        if let Some(r) = self.as_rational() {
            let v = r.to_f64().unwrap_or(f64::NAN);
            let err = (BigRational::from_float(v).map(|x| (x - &r).abs()).unwrap_or_else(BigRational::zero))
                .to_f64()
                .unwrap_or(0.0);
            return Approximation { value: v, error_bound: err, midpoint: r };
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << precision);
        let mut bits = precision + 8;
        loop {
            let iv = self.enclose(bits);
            if iv.width() <= target {
                let mid = iv.midpoint();
                let v = mid.to_f64().unwrap_or(f64::NAN);
                let half = (iv.width() / int(2)).to_f64().unwrap_or(0.0);
                let round = BigRational::from_float(v)
                    .map(|x| (x - &mid).abs().to_f64().unwrap_or(0.0))
                    .unwrap_or(0.0);
                return Approximation { value: v, error_bound: half + round, midpoint: mid };
            }
            bits += 32;
        }
    }

    /// Fast double-precision evaluation without an error bound.
    pub fn to_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.field.powers_f64())
            .map(|(c, p)| c.to_f64().unwrap_or(f64::NAN) * p)
            .sum()
    }

    /// Accurate double (error well below one ulp of typical magnitudes).
    pub fn to_f64_accurate(&self) -> f64 {
        self.embed_float(80).value
    }

    pub fn exact_cmp(&self, other: &AlgebraicScalar) -> Ordering {
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn abs(&self) -> AlgebraicScalar {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        self.as_poly().denominator_lcm().max(BigInt::one())
    }

    /// True when every power-basis coefficient is an integer.
    pub fn is_integral_in_basis(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Matrix (row-major, acting on coefficient columns) of multiplication by self.
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let s = self.field.degree();
        let mut m = vec![vec![BigRational::zero(); s]; s];
        let mut basis = Self::one(&self.field);
        let theta = Self::theta(&self.field);
        for j in 0..s {
            let col = self * &basis;
            for i in 0..s {
                m[i][j] = col.coeffs[i].clone();
            }
            basis = &basis * &theta;
        }
        m
    }

    /// Field trace over the rationals.
    pub fn trace(&self) -> BigRational {
        let m = self.multiplication_matrix();
        (0..m.len()).fold(BigRational::zero(), |acc, i| acc + &m[i][i])
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl<'a> std::ops::$tr<&'a AlgebraicScalar> for &'a AlgebraicScalar {
            type Output = AlgebraicScalar;
            fn $method(self, rhs: &'a AlgebraicScalar) -> AlgebraicScalar {
                debug_assert!(self.field.same_as(&rhs.field), "mixed number-field contexts");
                self.$inner(rhs)
            }
        }
        impl std::ops::$tr<AlgebraicScalar> for AlgebraicScalar {
            type Output = AlgebraicScalar;
            fn $method(self, rhs: AlgebraicScalar) -> AlgebraicScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_unchecked);
forward_binop!(Sub, sub, sub_unchecked);
forward_binop!(Mul, mul, mul_unchecked);

impl std::ops::Neg for &AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn neg(self) -> AlgebraicScalar {
        AlgebraicScalar::neg(self)
    }
}

impl PartialEq for AlgebraicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field.same_as(&other.field)
    }
}

impl Eq for AlgebraicScalar {}

impl Hash for AlgebraicScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for AlgebraicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exact_cmp(other)
    }
}

impl fmt::Debug for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.as_poly();
        if p.is_zero() {
            return write!(f, "0");
        }
        let s = p.to_string().replace('x', "t");
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::rat;

    pub(crate) fn golden() -> Arc<NumberField> {
        NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::one()], int(1), int(2)).unwrap()
    }

    #[test]
    fn golden_arithmetic() {
        let k = golden();
        let phi = AlgebraicScalar::theta(&k);
        let two_phi = scalar_arith(&phi, &phi, ScalarOp::Add).unwrap();
        assert_eq!(two_phi.coeffs(), &[int(0), int(2)]);
        let sq = scalar_arith(&phi, &phi, ScalarOp::Mul).unwrap();
        assert_eq!(sq.coeffs(), &[int(1), int(1)]);
    }

    #[test]
    fn rational_subtraction() {
        let q = NumberField::rationals();
        let a = AlgebraicScalar::from_rational(&q, rat(3, 2));
        let b = AlgebraicScalar::from_rational(&q, rat(1, 2));
        assert_eq!(scalar_arith(&a, &b, ScalarOp::Sub).unwrap(), AlgebraicScalar::one(&q));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let k = golden();
        let q = NumberField::rationals();
        let err = scalar_arith(&AlgebraicScalar::theta(&k), &AlgebraicScalar::one(&q), ScalarOp::Add);
        assert!(matches!(err, Err(ArithmeticError::Context { .. })));
    }

    #[test]
    fn signs() {
        let k = golden();
        let phi = AlgebraicScalar::theta(&k);
        let one = AlgebraicScalar::one(&k);
        assert_eq!((&phi - &one).sign(), 1);
        assert_eq!((&one - &phi).sign(), -1);
        assert_eq!(AlgebraicScalar::zero(&k).sign(), 0);
    }

    #[test]
    fn embedding_within_bound() {
        let k = golden();
        let a = AlgebraicScalar::theta(&k).embed_float(30);
        assert!((a.value - 1.618_033_988_749_895).abs() <= 2f64.powi(-30));
        assert!(a.error_bound <= 2f64.powi(-30));

        let q = NumberField::rationals();
        let half = AlgebraicScalar::from_rational(&q, rat(1, 2)).embed_float(10);
        assert_eq!(half.value, 0.5);
        assert_eq!(half.error_bound, 0.0);

        let k13 = NumberField::new(&[BigInt::from(-3), BigInt::from(-1), BigInt::one()], int(2), int(3)).unwrap();
        let l = AlgebraicScalar::theta(&k13).embed_float(30);
        assert!((l.value - 2.302_775_637_731_995).abs() <= 2f64.powi(-30));
    }

    #[test]
    fn minpoly_vanishes_at_theta() {
        let k = golden();
        let theta = AlgebraicScalar::theta(&k);
        let m = k.minpoly().clone();
        let mut acc = AlgebraicScalar::zero(&k);
        for (i, c) in m.coeffs().iter().enumerate() {
            acc = &acc + &theta.pow(i as u32).scale(c);
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn inverse() {
        let k = golden();
        let phi = AlgebraicScalar::theta(&k);
        let inv = phi.inv().unwrap();
        // 1/φ = φ - 1
        assert_eq!(inv.coeffs(), &[int(-1), int(1)]);
    }

    #[test]
    fn rejects_bad_fields() {
        let err = NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(2)], int(1), int(2)).unwrap_err();
        assert!(err.to_string().contains("minpoly not monic"));
        assert!(NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::one()], int(-2), int(2)).is_err());
        // x^2 - 4 is reducible
        assert!(NumberField::new(&[BigInt::from(-4), BigInt::zero(), BigInt::one()], int(1), int(3)).is_err());
    }
}
