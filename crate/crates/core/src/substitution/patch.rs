//! Integer point keys, colored point sets and the integer matrix function system.
//!
//! A point `x ∈ K^d` (with `K = Q(θ)` of degree `s`) is stored as the integer
//! vector `D · flat(x) ∈ Z^{d·s}`, where `flat` stacks power-basis coordinates
//! and `D` is a common denominator fixed per embedding. When `Q` has entries in
//! `Z[θ]` its regular representation is an integer matrix, so `Φ` acts on keys
//! by exact integer arithmetic.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::{AlgebraicScalar, AlgebraicVector, FieldSpec, NumberField};

use super::system::{default_color_name, SubstitutionSystem};
use super::SubstitutionError;

/// Map between exact vectors and integer keys.
#[derive(Debug)]
pub struct Embedding {
    field: Arc<NumberField>,
    d: usize,
    s: usize,
    denom: i64,
    theta_pows: Vec<f64>,
}

impl Embedding {
    pub fn new(field: &Arc<NumberField>, d: usize, denom: i64) -> Arc<Self> {
        assert!(denom > 0, "denominator must be positive");
        let s = field.degree();
        let theta_pows = (0..s)
            .map(|j| AlgebraicScalar::theta(field).pow(j as u32).to_f64_accurate())
            .collect();
        Arc::new(Embedding { field: field.clone(), d, s, denom, theta_pows })
    }

    /// Embedding whose denominator clears every digit of `sys`.
    pub fn for_system(sys: &SubstitutionSystem) -> Result<Arc<Self>, SubstitutionError> {
        let denom = sys
            .digit_denominator()
            .to_i64()
            .ok_or_else(|| SubstitutionError::Overflow("digit denominator exceeds i64".into()))?;
        Ok(Self::new(sys.field(), sys.dimension(), denom))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn key_len(&self) -> usize {
        self.d * self.s
    }

    pub fn key_of(&self, v: &AlgebraicVector) -> Result<Vec<i64>, SubstitutionError> {
        if v.dim() != self.d {
            return Err(SubstitutionError::Inconsistent(format!("expected a vector of dimension {}", self.d)));
        }
        let den = BigInt::from(self.denom);
        v.flat()
            .iter()
            .map(|c| {
                let scaled = c * BigRational::from_integer(den.clone());
                if !scaled.is_integer() {
                    return Err(SubstitutionError::Inconsistent(format!(
                        "coordinate {c} is not a multiple of 1/{}",
                        self.denom
                    )));
                }
                scaled
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| SubstitutionError::Overflow("converting a coordinate to a key".into()))
            })
            .collect()
    }

    pub fn vector_of(&self, key: &[i64]) -> AlgebraicVector {
        let den = BigInt::from(self.denom);
        let flat: Vec<BigRational> = key.iter().map(|&k| BigRational::new(BigInt::from(k), den.clone())).collect();
        AlgebraicVector::from_flat(&self.field, &flat)
    }

    pub fn scalar_of(&self, key: &[i64], coord: usize) -> AlgebraicScalar {
        let den = BigInt::from(self.denom);
        let c = key[coord * self.s..(coord + 1) * self.s]
            .iter()
            .map(|&k| BigRational::new(BigInt::from(k), den.clone()))
            .collect();
        AlgebraicScalar::from_coeffs(&self.field, c)
    }

    pub fn position(&self, key: &[i64]) -> Vec<f64> {
        let den = self.denom as f64;
        (0..self.d)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..self.s {
                    acc += key[i * self.s + j] as f64 * self.theta_pows[j];
                }
                acc / den
            })
            .collect()
    }

    /// Exact squared Euclidean norm of the point with this key.
    pub fn norm_sq(&self, key: &[i64]) -> AlgebraicScalar {
        let mut acc = AlgebraicScalar::zero(&self.field);
        for i in 0..self.d {
            let x = self.scalar_of(key, i);
            acc = &acc + &(&x * &x);
        }
        acc
    }

    /// Exact test `|x| ≤ r`, decided in floating point away from the boundary.
    pub fn within(&self, key: &[i64], r: f64) -> bool {
        let pos = self.position(key);
        let n2: f64 = pos.iter().map(|x| x * x).sum();
        let r2 = r * r;
        let slack = 1e-9 * (1.0 + r2);
        if n2 < r2 - slack {
            return true;
        }
        if n2 > r2 + slack {
            return false;
        }
        let Some(rr) = BigRational::from_f64(r) else { return false };
        let r2 = AlgebraicScalar::from_rational(&self.field, &rr * &rr);
        self.norm_sq(key).exact_cmp(&r2) != Ordering::Greater
    }
}

/// One point: exact key plus floating-point shadow.
#[derive(Clone, Debug)]
pub struct Point {
    pub key: Vec<i64>,
    pub pos: Vec<f64>,
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Point {}

impl std::hash::Hash for Point {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

fn pos_cmp(a: &Point, b: &Point) -> Ordering {
    for (x, y) in a.pos.iter().zip(&b.pos) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.key.cmp(&b.key)
}

/// A finite colored patch `(Λ_i ∩ W)_{i≤m}`.
#[derive(Clone, Debug)]
pub struct ColoredPointSet {
    emb: Arc<Embedding>,
    color_names: Vec<String>,
    colors: Vec<Vec<Point>>,
    window: f64,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema: u32,
    field: FieldSpec,
    dimension: usize,
    denominator: i64,
    window: f64,
    colors: Vec<SidecarColor<'a>>,
}

#[derive(Serialize)]
struct SidecarColor<'a> {
    name: &'a str,
    /// Per point, per coordinate, power-basis coefficients.
    points: Vec<Vec<Vec<String>>>,
}

impl ColoredPointSet {
    /// Builds a set from raw keys; duplicates within one color are an error.
    pub fn from_keys(
        emb: &Arc<Embedding>,
        color_names: Vec<String>,
        keys: Vec<Vec<Vec<i64>>>,
        window: f64,
    ) -> Result<Self, SubstitutionError> {
        let mut colors = Vec::with_capacity(keys.len());
        for (c, ks) in keys.into_iter().enumerate() {
            let mut pts: Vec<Point> = ks
                .into_par_iter()
                .map(|key| {
                    let pos = emb.position(&key);
                    Point { key, pos }
                })
                .collect();
            pts.par_sort_by(pos_cmp);
            if let Some(w) = pts.windows(2).find(|w| w[0].key == w[1].key) {
                return Err(SubstitutionError::Overlap {
                    color: color_names.get(c).cloned().unwrap_or_else(|| default_color_name(c)),
                    point: emb.vector_of(&w[0].key).to_string(),
                    first: "input".into(),
                    second: "input".into(),
                });
            }
            colors.push(pts);
        }
        Ok(ColoredPointSet { emb: emb.clone(), color_names, colors, window })
    }

    /// Builds a set from exact vectors, choosing a common denominator.
    pub fn from_vectors(
        field: &Arc<NumberField>,
        d: usize,
        color_names: Vec<String>,
        points: &[Vec<AlgebraicVector>],
        window: f64,
    ) -> Result<Self, SubstitutionError> {
        use num_integer::Integer;
        let den = points
            .iter()
            .flatten()
            .flat_map(|v| v.flat())
            .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        let den = den.to_i64().ok_or_else(|| SubstitutionError::Overflow("common denominator".into()))?;
        let emb = Embedding::new(field, d, den);
        let keys = points
            .iter()
            .map(|vs| vs.iter().map(|v| emb.key_of(v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_keys(&emb, color_names, keys, window)
    }

    /// Rational point sets (lattice windows and similar test inputs).
    pub fn from_rational_points(points: &[Vec<Vec<BigRational>>], window: f64) -> Result<Self, SubstitutionError> {
        let q = NumberField::rationals();
        let d = points.iter().flatten().next().map_or(1, |p| p.len());
        let vecs: Vec<Vec<AlgebraicVector>> = points
            .iter()
            .map(|c| c.iter().map(|p| AlgebraicVector::from_rationals(&q, p)).collect())
            .collect();
        let names = (0..points.len()).map(default_color_name).collect();
        Self::from_vectors(&q, d, names, &vecs, window)
    }

    /// `Z^d ∩ [-n, n]^d` as a single color.
    pub fn lattice_cube(d: usize, n: i64) -> Self {
        let q = NumberField::rationals();
        let emb = Embedding::new(&q, d, 1);
        let side = (2 * n + 1) as usize;
        let total = side.pow(d as u32);
        let keys = (0..total)
            .map(|mut idx| {
                (0..d)
                    .map(|_| {
                        let c = (idx % side) as i64 - n;
                        idx /= side;
                        c
                    })
                    .collect()
            })
            .collect();
        Self::from_keys(&emb, vec![default_color_name(0)], vec![keys], n as f64).expect("lattice points are distinct")
    }

    pub fn embedding(&self) -> &Arc<Embedding> {
        &self.emb
    }

    pub fn dim(&self) -> usize {
        self.emb.dim()
    }

    pub fn colors(&self) -> usize {
        self.colors.len()
    }

    pub fn color_names(&self) -> &[String] {
        &self.color_names
    }

    pub fn points(&self, color: usize) -> &[Point] {
        &self.colors[color]
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }

    pub fn len(&self) -> usize {
        self.colors.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> Vec<usize> {
        self.colors.iter().map(Vec::len).collect()
    }

    pub fn keys(&self) -> Vec<Vec<Vec<i64>>> {
        self.colors.iter().map(|c| c.iter().map(|p| p.key.clone()).collect()).collect()
    }

    pub fn vectors(&self, color: usize) -> Vec<AlgebraicVector> {
        self.colors[color].iter().map(|p| self.emb.vector_of(&p.key)).collect()
    }

    pub fn contains(&self, color: usize, key: &[i64]) -> bool {
        self.colors[color].iter().any(|p| p.key == key)
    }

    /// One color as a single-color set.
    pub fn select(&self, color: usize) -> Self {
        ColoredPointSet {
            emb: self.emb.clone(),
            color_names: vec![self.color_names[color].clone()],
            colors: vec![self.colors[color].clone()],
            window: self.window,
        }
    }

    /// The union of all colors as a single-color set named `union`.
    pub fn merged(&self) -> Self {
        ColoredPointSet {
            emb: self.emb.clone(),
            color_names: vec!["union".into()],
            colors: vec![self.union()],
            window: self.window,
        }
    }

    /// Distinct points of the union of all colors, sorted.
    pub fn union(&self) -> Vec<Point> {
        let mut all: Vec<Point> = self.colors.iter().flatten().cloned().collect();
        all.par_sort_by(pos_cmp);
        all.dedup_by(|a, b| a.key == b.key);
        all
    }

    /// Number of points shared by two or more colors.
    pub fn cross_color_coincidences(&self) -> usize {
        let mut seen: HashMap<&[i64], usize> = HashMap::new();
        for c in &self.colors {
            for p in c {
                *seen.entry(&p.key).or_default() += 1;
            }
        }
        seen.values().filter(|&&n| n > 1).count()
    }

    /// Restriction to the closed ball `|x| ≤ r` (exact boundary test).
    pub fn restrict_ball(&self, r: f64) -> Self {
        let colors = self
            .colors
            .iter()
            .map(|c| c.par_iter().filter(|p| self.emb.within(&p.key, r)).cloned().collect())
            .collect();
        ColoredPointSet { emb: self.emb.clone(), color_names: self.color_names.clone(), colors, window: r.min(self.window) }
    }

    /// Restriction to the cube `[-n, n]^d` (floating-point test).
    pub fn restrict_cube(&self, n: f64) -> Self {
        let colors = self
            .colors
            .iter()
            .map(|c| c.iter().filter(|p| p.pos.iter().all(|x| x.abs() <= n)).cloned().collect())
            .collect();
        ColoredPointSet { emb: self.emb.clone(), color_names: self.color_names.clone(), colors, window: n.min(self.window) }
    }

    /// Translate by an exact vector.
    pub fn translate(&self, v: &AlgebraicVector) -> Result<Self, SubstitutionError> {
        let t = self.emb.key_of(v)?;
        let keys = self
            .colors
            .iter()
            .map(|c| {
                c.iter()
                    .map(|p| {
                        p.key
                            .iter()
                            .zip(&t)
                            .map(|(a, b)| a.checked_add(*b).ok_or_else(|| SubstitutionError::Overflow("translating".into())))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_keys(&self.emb, self.color_names.clone(), keys, self.window)
    }

    /// CSV with header `color,coord_1,...,coord_d`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("color");
        for i in 1..=self.dim() {
            out.push_str(&format!(",coord_{i}"));
        }
        out.push('\n');
        for (c, pts) in self.colors.iter().enumerate() {
            for p in pts {
                out.push_str(&self.color_names[c]);
                for x in &p.pos {
                    out.push_str(&format!(",{x:.17e}"));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Exact sidecar: every coordinate as power-basis coefficients.
    pub fn sidecar_json(&self) -> String {
        let colors = self
            .colors
            .iter()
            .enumerate()
            .map(|(c, pts)| SidecarColor {
                name: &self.color_names[c],
                points: pts.iter().map(|p| self.emb.vector_of(&p.key).coeff_strings()).collect(),
            })
            .collect();
        let side = Sidecar {
            schema: 1,
            field: self.emb.field().spec(),
            dimension: self.dim(),
            denominator: self.emb.denom(),
            window: self.window,
            colors,
        };
        serde_json::to_string_pretty(&side).expect("sidecar serializes")
    }
}

/// Where a point of `Φ(Y)` came from, for overlap witnesses.
#[derive(Clone, Debug)]
struct Origin {
    parent_color: usize,
    parent: usize,
    digit: usize,
}

/// `Φ` on integer keys: color `j` at `x` yields color `i` at `Mx + a`, `a ∈ D_ij`.
#[derive(Clone, Debug)]
pub struct IntMfs {
    emb: Arc<Embedding>,
    m: usize,
    n: usize,
    /// Row-major `n×n` regular representation of `Q^power`.
    q: Vec<i64>,
    power: usize,
    digits: Vec<Vec<Vec<Vec<i64>>>>,
    color_names: Vec<String>,
    max_digit_norm: f64,
}

fn checked_matvec(q: &[i64], n: usize, v: &[i64]) -> Option<Vec<i64>> {
    let mut out = vec![0i64; n];
    for (r, o) in out.iter_mut().enumerate() {
        let mut acc: i64 = 0;
        for c in 0..n {
            let a = q[r * n + c];
            if a != 0 && v[c] != 0 {
                acc = acc.checked_add(a.checked_mul(v[c])?)?;
            }
        }
        *o = acc;
    }
    Some(out)
}

fn checked_add(a: &[i64], b: &[i64]) -> Option<Vec<i64>> {
    a.iter().zip(b).map(|(x, y)| x.checked_add(*y)).collect()
}

fn overflow() -> SubstitutionError {
    SubstitutionError::Overflow("iterating the matrix function system".into())
}

impl IntMfs {
    pub fn new(sys: &SubstitutionSystem, emb: &Arc<Embedding>) -> Result<Self, SubstitutionError> {
        let reg = sys.q().regular_representation();
        let rows = reg.to_i64().ok_or_else(|| {
            SubstitutionError::NotIntegral("Q must have entries in Z[θ] for exact iteration".into())
        })?;
        let n = rows.len();
        let digits = sys
            .digits()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|set| set.iter().map(|a| emb.key_of(a)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut mfs = IntMfs {
            emb: emb.clone(),
            m: sys.colors(),
            n,
            q: rows.into_iter().flatten().collect(),
            power: 1,
            digits,
            color_names: sys.color_names().to_vec(),
            max_digit_norm: 0.0,
        };
        mfs.refresh_norm();
        Ok(mfs)
    }

    fn refresh_norm(&mut self) {
        self.max_digit_norm = self
            .digits
            .iter()
            .flatten()
            .flatten()
            .map(|k| self.emb.position(k).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
    }

    pub fn embedding(&self) -> &Arc<Embedding> {
        &self.emb
    }

    pub fn colors(&self) -> usize {
        self.m
    }

    pub fn color_names(&self) -> &[String] {
        &self.color_names
    }

    /// Exponent `p` such that this is `Φ^p` of the base system.
    pub fn power(&self) -> usize {
        self.power
    }

    pub fn q_matrix(&self) -> &[i64] {
        &self.q
    }

    pub fn digits(&self, i: usize, j: usize) -> &[Vec<i64>] {
        &self.digits[i][j]
    }

    pub fn max_digit_norm(&self) -> f64 {
        self.max_digit_norm
    }

    pub fn apply_q(&self, key: &[i64]) -> Option<Vec<i64>> {
        checked_matvec(&self.q, self.n, key)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &IntMfs) -> Result<IntMfs, SubstitutionError> {
        let n = self.n;
        let mut q = vec![0i64; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc: i64 = 0;
                for k in 0..n {
                    acc = acc
                        .checked_add(self.q[r * n + k].checked_mul(other.q[k * n + c]).ok_or_else(overflow)?)
                        .ok_or_else(overflow)?;
                }
                q[r * n + c] = acc;
            }
        }
        let m = self.m;
        let mut digits = vec![vec![Vec::new(); m]; m];
        for (i, row) in digits.iter_mut().enumerate() {
            for (j, set) in row.iter_mut().enumerate() {
                for k in 0..m {
                    for b in &other.digits[k][j] {
                        let qb = self.apply_q(b).ok_or_else(overflow)?;
                        for a in &self.digits[i][k] {
                            set.push(checked_add(&qb, a).ok_or_else(overflow)?);
                        }
                    }
                }
            }
        }
        let mut out = IntMfs {
            emb: self.emb.clone(),
            m,
            n,
            q,
            power: self.power + other.power,
            digits,
            color_names: self.color_names.clone(),
            max_digit_norm: 0.0,
        };
        out.refresh_norm();
        Ok(out)
    }

    pub fn pow(&self, p: usize) -> Result<IntMfs, SubstitutionError> {
        assert!(p >= 1, "power must be positive");
        let mut acc = self.clone();
        for _ in 1..p {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Images of one colored point, as `(color, key)` pairs.
    pub fn children(&self, color: usize, key: &[i64]) -> Result<Vec<(usize, Vec<i64>)>, SubstitutionError> {
        let qx = self.apply_q(key).ok_or_else(overflow)?;
        let mut out = Vec::new();
        for i in 0..self.m {
            for a in &self.digits[i][color] {
                out.push((i, checked_add(&qx, a).ok_or_else(overflow)?));
            }
        }
        Ok(out)
    }

    /// `Φ(Y)` keeping only points accepted by `keep`; duplicates within a color abort.
    pub fn step_filtered<F>(&self, set: &[Vec<Vec<i64>>], keep: F) -> Result<Vec<Vec<Vec<i64>>>, SubstitutionError>
    where
        F: Fn(&[i64]) -> bool + Sync,
    {
        let mut produced: Vec<(usize, Vec<i64>, Origin)> = Vec::new();
        for (j, pts) in set.iter().enumerate() {
            let part: Result<Vec<Vec<(usize, Vec<i64>, Origin)>>, SubstitutionError> = pts
                .par_iter()
                .enumerate()
                .map(|(pi, x)| {
                    let qx = self.apply_q(x).ok_or_else(overflow)?;
                    let mut out = Vec::new();
                    for i in 0..self.m {
                        for (di, a) in self.digits[i][j].iter().enumerate() {
                            let y = checked_add(&qx, a).ok_or_else(overflow)?;
                            if keep(&y) {
                                out.push((i, y, Origin { parent_color: j, parent: pi, digit: di }));
                            }
                        }
                    }
                    Ok(out)
                })
                .collect();
            produced.extend(part?.into_iter().flatten());
        }
        produced.par_sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        if let Some(w) = produced.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            let describe = |o: &Origin| {
                let parent = self.emb.vector_of(&set[o.parent_color][o.parent]);
                format!("{} at {} with digit #{}", self.color_names[o.parent_color], parent, o.digit)
            };
            return Err(SubstitutionError::Overlap {
                color: self.color_names[w[0].0].clone(),
                point: self.emb.vector_of(&w[0].1).to_string(),
                first: describe(&w[0].2),
                second: describe(&w[1].2),
            });
        }
        let mut out = vec![Vec::new(); self.m];
        for (i, y, _) in produced {
            out[i].push(y);
        }
        Ok(out)
    }

    pub fn step(&self, set: &[Vec<Vec<i64>>]) -> Result<Vec<Vec<Vec<i64>>>, SubstitutionError> {
        self.step_filtered(set, |_| true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::system;
    fn fibonacci() -> SubstitutionSystem {
        system("fibonacci")
    }

    #[test]
    fn keys_round_trip() {
        let sys = fibonacci();
        let emb = Embedding::for_system(&sys).unwrap();
        let v = sys.vector(&["t+1"]).unwrap();
        let k = emb.key_of(&v).unwrap();
        assert_eq!(k, vec![1, 1]);
        assert_eq!(emb.vector_of(&k), v);
        assert!((emb.position(&k)[0] - 2.618033988749895).abs() < 1e-12);
    }

    #[test]
    fn one_step_of_fibonacci() {
        let sys = fibonacci();
        let emb = Embedding::for_system(&sys).unwrap();
        let mfs = IntMfs::new(&sys, &emb).unwrap();
        let out = mfs.step(&[vec![vec![0, 0]], vec![]]).unwrap();
        assert_eq!(out, vec![vec![vec![0, 0]], vec![vec![0, 1]]]);
        let two = mfs.pow(2).unwrap();
        assert_eq!(two.digits(1, 1), &[vec![0, 1]]);
    }

    #[test]
    fn exact_ball_boundary() {
        let q = NumberField::rationals();
        let emb = Embedding::new(&q, 2, 1);
        assert!(emb.within(&[3, 4], 5.0));
        assert!(!emb.within(&[3, 5], 5.0));
        let z = ColoredPointSet::lattice_cube(1, 3);
        assert_eq!(z.len(), 7);
        assert_eq!(z.restrict_ball(2.0).len(), 5);
    }
}
