//! Factorization of rational polynomials of low degree.
//!
//! A squarefree decomposition is computed exactly. Each squarefree part of
//! degree at most [`EXACT_DEGREE_CAP`] is then split by grouping its numeric
//! roots into candidate factors whose scaled coefficients round to integers;
//! every candidate is accepted only after exact polynomial division, so the
//! returned factors are always true factors. A part with no such grouping is
//! irreducible (its integer factors would appear among the candidates).

use itertools_lite::combinations;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::field::EXACT_DEGREE_CAP;
use super::poly::Poly;
use super::roots::aberth;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factorization {
    /// Monic irreducible factors with multiplicities.
    #[serde(serialize_with = "serialize_factors")]
    pub factors: Vec<(Poly, usize)>,
    /// False when some squarefree part exceeded the exact degree cap and was
    /// kept unsplit.
    pub exact: bool,
}

fn serialize_factors<S: serde::Serializer>(f: &[(Poly, usize)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(f.len()))?;
    for (p, m) in f {
        seq.serialize_element(&(p.to_strings(), *m))?;
    }
    seq.end()
}

impl Factorization {
    /// Product of the factors with multiplicity (monic).
    pub fn product(&self) -> Poly {
        self.factors.iter().fold(Poly::one(), |acc, (f, m)| acc.mul(&f.pow(*m as u32)))
    }
}

/// Irreducible factorization of `p` over the rationals.
pub fn factor(p: &Poly) -> Factorization {
    let mut factors = Vec::new();
    let mut exact = true;
    for (part, mult) in p.squarefree_decomposition() {
        match factor_squarefree_rational(&part) {
            Some(fs) => factors.extend(fs.into_iter().map(|f| (f, mult))),
            None => {
                exact = false;
                factors.push((part, mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.to_strings().cmp(&b.0.to_strings())));
    Factorization { factors, exact }
}

/// `Some(true)` if irreducible, `Some(false)` if not, `None` above the degree cap.
pub fn is_irreducible(p: &Poly) -> Option<bool> {
    let dec = p.squarefree_decomposition();
    if dec.len() != 1 || dec[0].1 != 1 {
        return Some(false);
    }
    factor_squarefree_rational(p).map(|f| f.len() == 1)
}

/// Splits a squarefree polynomial into monic irreducible factors; `None` if
/// the degree exceeds the exact cap.
pub fn factor_squarefree_rational(p: &Poly) -> Option<Vec<Poly>> {
    let deg = p.degree()?;
    if deg <= 1 {
        return Some(vec![p.monic()]);
    }
    if deg > EXACT_DEGREE_CAP {
        return None;
    }
    let mut g = Poly::from_bigints(&p.primitive_integer());
    let mut roots = aberth(&g);
    let mut out = Vec::new();
    let mut k = 1;
    'outer: while 2 * k <= g.degree().unwrap_or(0) {
        let lc = g.leading().to_integer();
        let divisors = small_divisors(&lc);
        for subset in combinations(roots.len(), k) {
            let zs: Vec<Complex64> = subset.iter().map(|&i| roots[i]).collect();
            let prod = product_from_roots(&zs);
            for b in &divisors {
                if let Some(h) = round_to_integer_poly(&prod, b) {
                    if let Some(q) = g.exact_div(&h) {
                        out.push(h.monic());
                        g = Poly::from_bigints(&q.primitive_integer());
                        let mut rest = Vec::new();
                        for (i, z) in roots.iter().enumerate() {
                            if !subset.contains(&i) {
                                rest.push(*z);
                            }
                        }
                        roots = rest;
                        continue 'outer;
                    }
                }
            }
        }
        k += 1;
    }
    if g.degree().unwrap_or(0) > 0 {
        out.push(g.monic());
    }
    Some(out)
}

fn product_from_roots(zs: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for z in zs {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * z;
        }
        c = next;
    }
    c
}

fn round_to_integer_poly(prod: &[Complex64], scale: &BigInt) -> Option<Poly> {
    let s = scale.to_f64()?;
    let mut out = Vec::with_capacity(prod.len());
    for c in prod {
        let v = c * s;
        let tol = 1e-6 * (1.0 + v.norm());
        if v.im.abs() > tol {
            return None;
        }
        let r = v.re.round();
        if (v.re - r).abs() > tol || r.abs() > 9.0e15 {
            return None;
        }
        out.push(BigRational::from_integer(BigInt::from(r as i64)));
    }
    let p = Poly::new(out);
    (p.degree().unwrap_or(0) > 0).then_some(p)
}

fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_one() || n.is_zero() {
        return vec![BigInt::one()];
    }
    let Some(v) = n.to_u64().filter(|v| *v <= 1_000_000) else {
        return vec![BigInt::one(), n];
    };
    (1..=v).filter(|d| v % d == 0).map(BigInt::from).collect()
}

mod itertools_lite {
    /// All `k`-subsets of `0..n` in lexicographic order.
    pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_linear_factor() {
        let f = factor(&Poly::from_ints([4, -4, 1]));
        assert!(f.exact);
        assert_eq!(f.factors, vec![(Poly::from_ints([-2, 1]), 2)]);
    }

    #[test]
    fn golden_is_irreducible() {
        assert_eq!(is_irreducible(&Poly::from_ints([-1, -1, 1])), Some(true));
        let f = factor(&Poly::from_ints([-1, -1, 1]));
        assert_eq!(f.factors.len(), 1);
    }

    #[test]
    fn cyclotomic_split() {
        let f = factor(&Poly::from_ints([-1, 0, 0, 0, 1]));
        let polys: Vec<Poly> = f.factors.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(polys.len(), 3);
        assert!(polys.contains(&Poly::from_ints([-1, 1])));
        assert!(polys.contains(&Poly::from_ints([1, 1])));
        assert!(polys.contains(&Poly::from_ints([1, 0, 1])));
        assert_eq!(f.product(), Poly::from_ints([-1, 0, 0, 0, 1]));
    }

    #[test]
    fn quartic_into_quadratics() {
        // (x^2 - x - 1)(x^2 - x - 3)
        let p = Poly::from_ints([-1, -1, 1]).mul(&Poly::from_ints([-3, -1, 1]));
        let f = factor(&p);
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.product(), p);
    }

    #[test]
    fn non_monic_input() {
        // (2x - 1)(x + 3)
        let p = Poly::from_ints([-1, 2]).mul(&Poly::from_ints([3, 1]));
        let f = factor(&p);
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.product(), p.monic());
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(5, 1).len(), 5);
    }
}
