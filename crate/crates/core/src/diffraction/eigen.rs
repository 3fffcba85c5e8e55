//! Dynamical eigenvalue test `||<Q^n x, α>|| → 0` over the generators of `Ξ`,
//! and the sieve over the rational dual grid.
//!
//! Candidates are `α = Σ_k (p_k/q) α_k`, where `α_k` is the basis dual to the
//! generators `g_i` under the trace form `Tr<g_i, α_k> = δ_ik`. The inner
//! products `<Q^n g_j, α_k> = Σ_i (M^n)_{ji} <g_i, α_k>` are kept as fixed-point
//! integers, so the distance to the nearest integer is read off exactly up to a
//! rounding error far below any tolerance of interest.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::{AlgebraicScalar, AlgebraicVector, FieldMatrix, RationalMatrix};
use crate::control::XiModule;

use super::{relative_density, DiffractionError};

/// Headroom bits on top of the growth of `M^n`.
const GUARD_BITS: u64 = 64;
/// Iterates inspected by the pass rule.
pub const TAIL: usize = 5;
/// Largest allowed growth between consecutive inspected iterates.
pub const GROWTH: f64 = 10.0;

/// A point `Σ_k (p_k/q) α_k` of the rational dual grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Candidate {
    pub p: Vec<i64>,
    pub q: i64,
}

impl Candidate {
    pub fn zero(n: usize) -> Self {
        Candidate { p: vec![0; n], q: 1 }
    }

    /// Lowest terms with `q > 0`.
    pub fn reduced(&self) -> Self {
        let g = self.p.iter().fold(self.q, |g, &x| g.gcd(&x));
        let s = if self.q < 0 { -g.abs() } else { g.abs() };
        Candidate { p: self.p.iter().map(|x| x / s).collect(), q: self.q / s }
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        Candidate { p: self.p.iter().map(|x| -x).collect(), q: self.q }
    }

    pub fn add(&self, other: &Candidate) -> Self {
        let l = self.q.lcm(&other.q);
        let (a, b) = (l / self.q, l / other.q);
        Candidate { p: self.p.iter().zip(&other.p).map(|(x, y)| a * x + b * y).collect(), q: l }.reduced()
    }

    pub fn height(&self) -> i64 {
        self.p.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn coords(&self) -> Vec<String> {
        self.p.iter().map(|x| BigRational::new(BigInt::from(*x), BigInt::from(self.q)).to_string()).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub generator: usize,
    pub n: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenTest {
    pub alpha: Vec<f64>,
    /// Coordinates in the dual basis.
    pub coords: Vec<String>,
    pub pass: bool,
    /// `(n, max_j ||<Q^n g_j, α>||)`.
    pub curve: Vec<(usize, f64)>,
    pub witness: Option<Witness>,
}

impl EigenTest {
    /// Largest distance over the inspected tail.
    pub fn score(&self) -> f64 {
        self.curve.iter().rev().take(TAIL).map(|c| c.1).fold(0.0, f64::max)
    }
}

/// Generators of `Ξ`, the integer matrix of `Q` on them and the dual basis.
#[derive(Clone, Debug)]
pub struct DualModule {
    dim: usize,
    generators: Vec<AlgebraicVector>,
    m: Vec<Vec<i64>>,
    basis: Vec<AlgebraicVector>,
    basis_f64: Vec<Vec<f64>>,
    n_max: usize,
    precision: u64,
    /// `v[n][j][k] ≈ 2^precision <Q^n g_j, α_k>`.
    v: Vec<Vec<Vec<BigInt>>>,
    /// `Tr<g_i, ·>` on flat coordinates; row `i`.
    trace_rows: RationalMatrix,
}

fn big_matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = b.len();
    a.iter()
        .map(|row| {
            (0..b[0].len()).map(|j| (0..n).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j])).collect()
        })
        .collect()
}

impl DualModule {
    pub fn new(xi: &XiModule, q: &FieldMatrix, n_max: usize) -> Result<Self, DiffractionError> {
        let gens = xi.generators.clone();
        let Some(first) = gens.first() else { return Err(DiffractionError::Invalid("Ξ has no generators".into())) };
        let field = first.field().clone();
        let d = first.dim();
        let s = field.degree();
        let n = gens.len();
        if n != d * s {
            return Err(DiffractionError::Invalid(format!(
                "Ξ has rank {n} over Z, the trace-dual basis needs rank {}",
                d * s
            )));
        }
        let mut m = vec![vec![0i64; n]; n];
        for (j, g) in gens.iter().enumerate() {
            let img = q.apply(g).map_err(|e| DiffractionError::Invalid(e.to_string()))?;
            let c = xi.coordinates(&img).ok_or_else(|| DiffractionError::NotClosed(format!("Q g_{j} ∉ Ξ")))?;
            for (i, ci) in c.iter().enumerate() {
                m[j][i] = ci.to_i64().ok_or_else(|| DiffractionError::Invalid("entry of M overflows".into()))?;
            }
        }
        // trace form on power-basis coefficients
        let theta = AlgebraicScalar::theta(&field);
        let tr: Vec<BigRational> = (0..2 * s).map(|e| theta.pow(e as u32).trace()).collect();
        let mut w = RationalMatrix::zeros(n, n);
        for (i, g) in gens.iter().enumerate() {
            for (c, e) in g.entries().iter().enumerate() {
                for b in 0..s {
                    let val = e.coeffs().iter().enumerate().fold(BigRational::zero(), |acc, (a, x)| acc + x * &tr[a + b]);
                    w.set(i, c * s + b, val);
                }
            }
        }
        let winv = w.inverse().ok_or_else(|| DiffractionError::Invalid("trace form is singular on Ξ".into()))?;
        let basis: Vec<AlgebraicVector> = (0..n)
            .map(|k| {
                let col: Vec<BigRational> = (0..n).map(|r| winv.get(r, k).clone()).collect();
                AlgebraicVector::from_flat(&field, &col)
            })
            .collect();
        let basis_f64: Vec<Vec<f64>> = basis.iter().map(|b| b.to_f64_accurate()).collect();

        let big_m: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut powers = vec![(0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect::<Vec<Vec<BigInt>>>()];
        for _ in 0..n_max {
            let next = big_matmul(powers.last().expect("nonempty"), &big_m);
            powers.push(next);
        }
        let growth = powers
            .iter()
            .flat_map(|p| p.iter().map(|r| r.iter().fold(BigInt::zero(), |a, x| a + x.abs())))
            .max()
            .unwrap_or_else(BigInt::one)
            .bits();
        let precision = GUARD_BITS + growth;
        let scale = BigRational::from_integer(BigInt::one() << precision);
        let b: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                basis
                    .iter()
                    .map(|a| (g.dot(a).embed_float(precision as u32 + 8).midpoint * &scale).round().to_integer())
                    .collect()
            })
            .collect();
        let v = powers.iter().map(|p| big_matmul(p, &b)).collect();
        Ok(DualModule { dim: d, generators: gens, m, basis, basis_f64, n_max, precision, v, trace_rows: w })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn generators(&self) -> &[AlgebraicVector] {
        &self.generators
    }

    /// The basis `α_k` with `Tr<g_i, α_k> = δ_ik`.
    pub fn basis(&self) -> &[AlgebraicVector] {
        &self.basis
    }

    pub fn basis_f64(&self) -> &[Vec<f64>] {
        &self.basis_f64
    }

    pub fn position(&self, c: &Candidate) -> Vec<f64> {
        (0..self.dim)
            .map(|a| c.p.iter().zip(&self.basis_f64).map(|(p, b)| *p as f64 * b[a]).sum::<f64>() / c.q as f64)
            .collect()
    }

    /// Dual coordinates of an exact vector, `c_k = Tr<g_k, α>`.
    pub fn candidate_of(&self, alpha: &AlgebraicVector) -> Option<Candidate> {
        let c = self.trace_rows.mul_vec(&alpha.flat());
        let q = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let p: Option<Vec<i64>> = c.iter().map(|x| (x * BigRational::from_integer(q.clone())).to_integer().to_i64()).collect();
        Some(Candidate { p: p?, q: q.to_i64()? })
    }

    /// `||<Q^n g_j, α>||` for `n ∈ ns`, indexed `[n][j]`.
    pub fn distances(&self, c: &Candidate, ns: std::ops::RangeInclusive<usize>) -> Vec<Vec<f64>> {
        let modulus = BigInt::from(c.q) << self.precision;
        let mf = modulus.to_f64().unwrap_or(f64::INFINITY);
        ns.map(|n| {
            self.v[n]
                .iter()
                .map(|row| {
                    let s = row.iter().zip(&c.p).fold(BigInt::zero(), |acc, (x, p)| acc + x * *p);
                    let r = s.mod_floor(&modulus);
                    let dist = std::cmp::min(r.clone(), &modulus - &r);
                    dist.to_f64().unwrap_or(f64::INFINITY) / mf
                })
                .collect()
        })
        .collect()
    }

    fn verdict(&self, rows: &[Vec<f64>], first_n: usize, tol: f64) -> Option<Witness> {
        let tail = rows.len().saturating_sub(TAIL);
        for (t, row) in rows.iter().enumerate().skip(tail) {
            for (j, &dist) in row.iter().enumerate() {
                let grew = t > tail && dist > GROWTH * rows[t - 1][j].max(1e-12);
                if dist > tol || grew {
                    return Some(Witness { generator: j, n: first_n + t, distance: dist });
                }
            }
        }
        None
    }

    /// Pass iff the last `TAIL` iterates up to `n_max` are within `tol` of an
    /// integer for every generator, without growing by more than `GROWTH`.
    pub fn test(&self, c: &Candidate, tol: f64) -> EigenTest {
        let rows = self.distances(c, 0..=self.n_max);
        let witness = self.verdict(&rows, 0, tol);
        EigenTest {
            alpha: self.position(c),
            coords: c.coords(),
            pass: witness.is_none(),
            curve: rows.iter().enumerate().map(|(n, r)| (n, r.iter().copied().fold(0.0, f64::max))).collect(),
            witness,
        }
    }

    /// The pass rule evaluated on the tail only.
    pub fn passes(&self, c: &Candidate, tol: f64) -> bool {
        let lo = self.n_max.saturating_sub(TAIL - 1);
        let rows = self.distances(c, lo..=self.n_max);
        self.verdict(&rows, lo, tol).is_none()
    }

    /// The simplest grid point within `tol` (max norm) of `k`: smallest
    /// `q·max(height, 1)` over `q ≤ q_max` and `|p_k| ≤ height·q`.
    pub fn snap(&self, k: &[f64], q_max: i64, height: i64, tol: f64) -> Option<Candidate> {
        let n = self.rank();
        let d = self.dim;
        let a = DMatrix::from_fn(d, n, |r, c| self.basis_f64[c][r]);
        // d columns forming an invertible block, the rest enumerated
        let mut pivots: Vec<usize> = Vec::new();
        for c in (0..n).rev() {
            let mut cols = pivots.clone();
            cols.push(c);
            let sub = DMatrix::from_fn(d, cols.len(), |r, i| a[(r, cols[i])]);
            if sub.rank(1e-12) == cols.len() {
                pivots = cols;
            }
            if pivots.len() == d {
                break;
            }
        }
        if pivots.len() < d {
            return None;
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let block = DMatrix::from_fn(d, d, |r, i| a[(r, pivots[i])]);
        let inv = block.try_inverse()?;
        let kv = DVector::from_column_slice(k);
        let complexity = |c: &Candidate| c.q * c.height().max(1);
        let mut best: Option<Candidate> = None;
        for q in 1..=q_max {
            let bound = best.as_ref().map_or(i64::MAX, complexity);
            if q >= bound {
                break;
            }
            let h = (height * q).min(bound / q);
            let span = (2 * h + 1) as usize;
            let total = span.checked_pow(free.len() as u32)?;
            for idx in 0..total {
                let mut p = vec![0i64; n];
                let mut t = idx;
                for &f in &free {
                    p[f] = (t % span) as i64 - h;
                    t /= span;
                }
                let mut rest = kv.clone() * q as f64;
                for &f in &free {
                    rest -= a.column(f) * p[f] as f64;
                }
                let sol = &inv * rest;
                for (i, &c) in pivots.iter().enumerate() {
                    p[c] = sol[i].round() as i64;
                }
                let cand = Candidate { p, q }.reduced();
                if cand.height() > h {
                    continue;
                }
                let pos = self.position(&cand);
                if pos.iter().zip(k).all(|(x, y)| (x - y).abs() <= tol)
                    && best.as_ref().map_or(true, |b| complexity(&cand) < complexity(b))
                {
                    best = Some(cand);
                }
            }
        }
        best
    }
}

/// Tests one exact vector against the eigenvalue criterion.
pub fn eigenvalue_test(
    alpha: &AlgebraicVector,
    xi: &XiModule,
    q: &FieldMatrix,
    n_max: usize,
    tol: f64,
) -> Result<EigenTest, DiffractionError> {
    let dual = DualModule::new(xi, q, n_max)?;
    let c = dual
        .candidate_of(alpha)
        .ok_or_else(|| DiffractionError::Invalid("dual coordinates overflow".into()))?;
    Ok(dual.test(&c, tol))
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchParams {
    /// Candidates lie in `[-box_half, box_half]^d`.
    pub box_half: f64,
    pub q_max: i64,
    /// Height bound for integral candidates.
    pub height: i64,
    pub n_max: usize,
    pub tol: f64,
    /// Cap on the number of grid candidates; fractional heights shrink to fit.
    pub max_candidates: usize,
    /// Cap on pairwise sums tested for closure.
    pub closure_pairs: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            box_half: 5.0,
            q_max: 32,
            height: 20,
            n_max: 40,
            tol: 1e-4,
            max_candidates: 200_000,
            closure_pairs: 200_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Accepted {
    pub alpha: Vec<f64>,
    pub coords: Vec<String>,
    #[serde(skip)]
    pub candidate: Candidate,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueSet {
    pub params: SearchParams,
    /// Dual basis vectors as floats.
    pub dual_basis: Vec<Vec<f64>>,
    pub m: Vec<Vec<i64>>,
    /// Height bound `|p_k| ≤ fraction_height·q` used for `q ≥ 2`.
    pub fraction_height: i64,
    pub tested: usize,
    pub accepted: Vec<Accepted>,
    pub rejected: usize,
    /// Full curves for the first few rejected candidates nearest the origin.
    pub rejected_sample: Vec<EigenTest>,
    pub closure_tested: usize,
    pub closure_added: usize,
    /// Largest empty-ball radius of the accepted set in the search box.
    pub max_gap: f64,
}

const REJECTED_SAMPLE: usize = 8;

fn enumerate(n: usize, h: i64, q: i64, out: &mut Vec<Candidate>) {
    let span = (2 * h + 1) as usize;
    for idx in 0..span.pow(n as u32) {
        let mut t = idx;
        let p: Vec<i64> = (0..n)
            .map(|_| {
                let x = (t % span) as i64 - h;
                t /= span;
                x
            })
            .collect();
        let c = Candidate { p, q };
        if q == 1 || c.reduced().q == q {
            out.push(c);
        }
    }
}

fn grid(dual: &DualModule, params: &SearchParams) -> (Vec<Candidate>, i64) {
    let n = dual.rank();
    let inside = |c: &Candidate| dual.position(c).iter().all(|x| x.abs() <= params.box_half + 1e-12);
    let count = |h: i64| -> usize { (2..=params.q_max).map(|q| ((2 * h * q + 1) as usize).saturating_pow(n as u32)).sum() };
    let mut fh = params.height.max(1);
    while fh > 1 && count(fh) > params.max_candidates {
        fh -= 1;
    }
    let mut out = Vec::new();
    enumerate(n, params.height, 1, &mut out);
    let mut q = 2;
    while q <= params.q_max && out.len() < params.max_candidates {
        enumerate(n, fh * q, q, &mut out);
        q += 1;
    }
    out.retain(inside);
    out.truncate(params.max_candidates);
    (out, fh)
}

/// Sieves the rational dual grid with the eigenvalue test, then closes the
/// accepted set under pairwise sums inside the box.
pub fn eigenvalue_search(xi: &XiModule, q: &FieldMatrix, params: &SearchParams) -> Result<EigenvalueSet, DiffractionError> {
    if !xi.full_rank {
        return Err(DiffractionError::Invalid("Ξ does not span R^d".into()));
    }
    let dual = DualModule::new(xi, q, params.n_max)?;
    search_with(&dual, params)
}

pub fn search_with(dual: &DualModule, params: &SearchParams) -> Result<EigenvalueSet, DiffractionError> {
    if dual.n_max() < params.n_max {
        return Err(DiffractionError::Invalid("dual module built for a smaller n_max".into()));
    }
    let (cands, fh) = grid(dual, params);
    let verdicts: Vec<bool> = cands.par_iter().map(|c| dual.passes(c, params.tol)).collect();
    let mut accepted: Vec<Candidate> = Vec::new();
    let mut rejected: Vec<&Candidate> = Vec::new();
    for (c, ok) in cands.iter().zip(&verdicts) {
        if *ok {
            accepted.push(c.reduced());
        } else {
            rejected.push(c);
        }
    }
    let mut seen: HashSet<Candidate> = accepted.iter().cloned().collect();
    if seen.insert(Candidate::zero(dual.rank())) {
        accepted.push(Candidate::zero(dual.rank()));
    }
    // closure under pairwise sums
    let inside = |c: &Candidate| dual.position(c).iter().all(|x| x.abs() <= params.box_half + 1e-12);
    let mut sums: Vec<Candidate> = Vec::new();
    let mut pairs = 0usize;
    'outer: for i in 0..accepted.len() {
        for j in i..accepted.len() {
            if pairs >= params.closure_pairs {
                break 'outer;
            }
            pairs += 1;
            let s = accepted[i].add(&accepted[j]);
            if !seen.contains(&s) && inside(&s) {
                seen.insert(s.clone());
                sums.push(s);
            }
        }
    }
    let sum_ok: Vec<bool> = sums.par_iter().map(|c| dual.passes(c, params.tol)).collect();
    let added = sum_ok.iter().filter(|&&b| b).count();
    accepted.extend(sums.into_iter().zip(sum_ok).filter(|t| t.1).map(|t| t.0));
    accepted.sort_by(|a, b| {
        let (pa, pb) = (dual.position(a), dual.position(b));
        pa.iter().zip(&pb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    rejected.sort_by(|a, b| {
        let na: f64 = dual.position(a).iter().map(|x| x.abs()).sum();
        let nb: f64 = dual.position(b).iter().map(|x| x.abs()).sum();
        na.total_cmp(&nb)
    });
    let rejected_sample = rejected.iter().take(REJECTED_SAMPLE).map(|c| dual.test(c, params.tol)).collect();
    let d = dual.dim();
    let pts: Vec<Vec<f64>> = accepted.iter().map(|c| dual.position(c)).collect();
    let max_gap = relative_density(&pts, &vec![-params.box_half; d], &vec![params.box_half; d]);
    Ok(EigenvalueSet {
        params: params.clone(),
        dual_basis: dual.basis_f64().to_vec(),
        m: dual.m().to_vec(),
        fraction_height: fh,
        tested: cands.len() + pairs,
        accepted: accepted
            .into_iter()
            .zip(pts)
            .map(|(c, alpha)| Accepted { alpha, coords: c.coords(), candidate: c })
            .collect(),
        rejected: rejected.len(),
        rejected_sample,
        closure_tested: pairs,
        closure_added: added,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::xi_observe;
    use crate::substitution::generate_patch;

    fn fibonacci(n_max: usize) -> (DualModule, crate::substitution::SubstitutionSystem, XiModule) {
        let sys = crate::catalog::system("fibonacci");
        let patch = generate_patch(&sys, 30.0).unwrap();
        let xi = xi_observe(&sys, &patch).unwrap();
        (DualModule::new(&xi, sys.q(), n_max).unwrap(), sys, xi)
    }

    #[test]
    fn dual_basis_is_dual_under_the_trace() {
        let (dual, _, _) = fibonacci(10);
        for (i, g) in dual.generators().iter().enumerate() {
            for (k, a) in dual.basis().iter().enumerate() {
                assert_eq!(g.dot(a).trace(), BigRational::from_integer(BigInt::from((i == k) as i64)));
            }
        }
    }

    #[test]
    fn one_is_an_eigenvalue_of_fibonacci() {
        let (_, sys, xi) = fibonacci(40);
        let t = eigenvalue_test(&sys.vector(&["1"]).unwrap(), &xi, sys.q(), 40, 1e-4).unwrap();
        assert!(t.pass, "{:?}", t.witness);
        // ||φ^n|| = |φ'|^n for the generator 1
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((t.curve[20].1 - (phi - 1.0).powi(20)).abs() < 1e-12 || t.curve[20].1 <= (phi - 1.0).powi(19));
        let z = eigenvalue_test(&sys.zero_vector(), &xi, sys.q(), 40, 1e-4).unwrap();
        assert!(z.pass && z.score() == 0.0);
    }

    #[test]
    fn candidate_arithmetic() {
        let a = Candidate { p: vec![1, 2], q: 4 };
        let b = Candidate { p: vec![1, 0], q: 4 };
        assert_eq!(a.add(&b), Candidate { p: vec![1, 1], q: 2 });
        assert_eq!(a.add(&a.neg()), Candidate::zero(2));
    }

    #[test]
    fn snapping_recovers_grid_points() {
        let (dual, _, _) = fibonacci(10);
        let c = Candidate { p: vec![3, -2], q: 1 };
        let k = dual.position(&c);
        assert_eq!(dual.snap(&k, 4, 50, 1e-9), Some(c));
    }
}
