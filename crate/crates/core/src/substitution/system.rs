use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::arithmetic::expr::parse_scalar;
use crate::arithmetic::rational::parse_rational;
use crate::arithmetic::{AlgebraicVector, FieldMatrix, NumberField};
use crate::spectral::{spectral_data, SpectralData};

use super::config::{Lit, SystemConfig};
use super::SubstitutionError;

/// A substitution Delone multiset description: `Λ_i = ∪_j (Q Λ_j + D_ij)`.
#[derive(Clone, Debug)]
pub struct SubstitutionSystem {
    config: SystemConfig,
    name: String,
    d: usize,
    m: usize,
    color_names: Vec<String>,
    field: Arc<NumberField>,
    q: FieldMatrix,
    digits: Vec<Vec<Vec<AlgebraicVector>>>,
}

fn cfg_err(field: impl Into<String>, message: impl ToString) -> SubstitutionError {
    SubstitutionError::Config { field: field.into(), message: message.to_string() }
}

fn lit_string(l: &Lit) -> String {
    l.to_string()
}

impl SubstitutionSystem {
    pub fn from_config(config: &SystemConfig) -> Result<Self, SubstitutionError> {
        let d = config.dimension;
        let m = config.colors;
        if d == 0 {
            return Err(cfg_err("dimension", "must be positive"));
        }
        if m == 0 {
            return Err(cfg_err("colors", "must be positive"));
        }
        let field = match &config.theta {
            None => NumberField::rationals(),
            Some(t) => {
                let coeffs = t
                    .minpoly
                    .iter()
                    .map(|c| {
                        let r = parse_rational(&lit_string(c)).map_err(|e| cfg_err("theta.minpoly", e))?;
                        if !r.is_integer() {
                            return Err(cfg_err("theta.minpoly", format!("coefficient {c} is not an integer")));
                        }
                        Ok(r.to_integer())
                    })
                    .collect::<Result<Vec<BigInt>, _>>()?;
                let lo = parse_rational(&lit_string(&t.root_interval[0])).map_err(|e| cfg_err("theta.root_interval", e))?;
                let hi = parse_rational(&lit_string(&t.root_interval[1])).map_err(|e| cfg_err("theta.root_interval", e))?;
                NumberField::new(&coeffs, lo, hi).map_err(|e| {
                    let f = if e.to_string().contains("root_interval") { "theta.root_interval" } else { "theta.minpoly" };
                    cfg_err(f, e)
                })?
            }
        };
        if config.q.len() != d || config.q.iter().any(|r| r.len() != d) {
            return Err(cfg_err("Q", format!("must be a {d}x{d} matrix")));
        }
        let q_rows = config
            .q
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| parse_scalar(&field, &lit_string(e)).map_err(|err| cfg_err(format!("Q[{i}][{j}]"), err)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let q = FieldMatrix::new(&field, q_rows).map_err(|e| cfg_err("Q", e))?;
        if config.digits.len() != m || config.digits.iter().any(|r| r.len() != m) {
            return Err(cfg_err("digits", format!("must be a {m}x{m} array of vector lists")));
        }
        let mut digits = Vec::with_capacity(m);
        for (i, row) in config.digits.iter().enumerate() {
            let mut out_row = Vec::with_capacity(m);
            for (j, set) in row.iter().enumerate() {
                let mut vs: Vec<AlgebraicVector> = Vec::with_capacity(set.len());
                for (k, v) in set.iter().enumerate() {
                    let path = format!("digits[{i}][{j}][{k}]");
                    if v.len() != d {
                        return Err(cfg_err(path, format!("vector must have {d} entries")));
                    }
                    let entries = v
                        .iter()
                        .map(|e| parse_scalar(&field, &lit_string(e)).map_err(|err| cfg_err(path.clone(), err)))
                        .collect::<Result<Vec<_>, _>>()?;
                    let vec = AlgebraicVector::new(entries).map_err(|e| cfg_err(path.clone(), e))?;
                    if vs.contains(&vec) {
                        return Err(cfg_err(path, "repeated digit"));
                    }
                    vs.push(vec);
                }
                out_row.push(vs);
            }
            digits.push(out_row);
        }
        let color_names = if config.color_names.is_empty() {
            (0..m).map(default_color_name).collect()
        } else if config.color_names.len() == m {
            config.color_names.clone()
        } else {
            return Err(cfg_err("color_names", format!("expected {m} names")));
        };
        Ok(SubstitutionSystem { config: config.clone(), name: config.name.clone(), d, m, color_names, field, q, digits })
    }

    pub fn from_json(src: &str) -> Result<Self, SubstitutionError> {
        let cfg = SystemConfig::from_json(src).map_err(|e| cfg_err("json", e))?;
        Self::from_config(&cfg)
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn colors(&self) -> usize {
        self.m
    }

    pub fn color_names(&self) -> &[String] {
        &self.color_names
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn q(&self) -> &FieldMatrix {
        &self.q
    }

    pub fn q_f64(&self) -> DMatrix<f64> {
        self.q.to_f64()
    }

    pub fn digits(&self) -> &[Vec<Vec<AlgebraicVector>>] {
        &self.digits
    }

    pub fn digit_set(&self, i: usize, j: usize) -> &[AlgebraicVector] {
        &self.digits[i][j]
    }

    /// Copy with one digit set replaced.
    pub fn with_digit_set(&self, i: usize, j: usize, set: Vec<AlgebraicVector>) -> Self {
        let mut s = self.clone();
        s.digits[i][j] = set;
        s
    }

    pub fn substitution_matrix(&self) -> SubstitutionMatrix {
        SubstitutionMatrix {
            s: self.digits.iter().map(|row| row.iter().map(|set| set.len() as u64).collect()).collect(),
        }
    }

    pub fn spectral(&self) -> Result<SpectralData, SubstitutionError> {
        spectral_data(&self.q).map_err(SubstitutionError::Spectral)
    }

    /// Least common denominator of all digit coordinates.
    pub fn digit_denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.digits
            .iter()
            .flatten()
            .flatten()
            .flat_map(|v| v.flat())
            .fold(BigInt::one(), |acc, x: BigRational| acc.lcm(x.denom()))
    }

    pub fn max_digit_norm(&self) -> f64 {
        self.digits.iter().flatten().flatten().map(|v| v.norm_f64()).fold(0.0, f64::max)
    }

    pub fn zero_vector(&self) -> AlgebraicVector {
        AlgebraicVector::zero(&self.field, self.d)
    }

    /// Builds a vector in this system's field from expressions such as `"t+1"`.
    pub fn vector(&self, exprs: &[&str]) -> Result<AlgebraicVector, SubstitutionError> {
        if exprs.len() != self.d {
            return Err(cfg_err("vector", format!("expected {} entries", self.d)));
        }
        let entries = exprs
            .iter()
            .map(|e| parse_scalar(&self.field, e).map_err(|err| cfg_err("vector", err)))
            .collect::<Result<Vec<_>, _>>()?;
        AlgebraicVector::new(entries).map_err(|e| cfg_err("vector", e))
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.color_names.iter().position(|c| c == name)
    }
}

pub fn default_color_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("c{i}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubstitutionMatrix {
    pub s: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Primitivity {
    Primitive { l: usize },
    NotPrimitive { l_max: usize },
}

impl SubstitutionMatrix {
    pub fn size(&self) -> usize {
        self.s.len()
    }

    /// Exact power with saturation at `u64::MAX`.
    pub fn pow(&self, e: usize) -> Vec<Vec<u64>> {
        let n = self.size();
        let mut acc: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        for _ in 0..e {
            let mut next = vec![vec![0u64; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if acc[i][k] == 0 {
                        continue;
                    }
                    for j in 0..n {
                        next[i][j] = next[i][j].saturating_add(acc[i][k].saturating_mul(self.s[k][j]));
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// Smallest `l ≤ l_max` with `S^l` strictly positive.
    pub fn is_primitive(&self, l_max: usize) -> Primitivity {
        let n = self.size();
        let pattern: Vec<Vec<bool>> = self.s.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
        let mut acc = pattern.clone();
        for l in 1..=l_max {
            if acc.iter().flatten().all(|&b| b) {
                return Primitivity::Primitive { l };
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if acc[i][k] {
                        for j in 0..n {
                            next[i][j] |= pattern[k][j];
                        }
                    }
                }
            }
            acc = next;
        }
        Primitivity::NotPrimitive { l_max }
    }

    /// Perron-Frobenius eigenvalue and a positive right eigenvector (power iteration).
    pub fn perron_frobenius(&self) -> (f64, Vec<f64>) {
        let n = self.size();
        let s: Vec<Vec<f64>> = self.s.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let mut v = vec![1.0 / n as f64; n];
        let mut lam = 0.0;
        for _ in 0..2000 {
            // iterate with S + I to avoid periodic oscillation
            let mut w: Vec<f64> = (0..n).map(|i| v[i] + (0..n).map(|j| s[i][j] * v[j]).sum::<f64>()).collect();
            let norm: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= norm);
            let diff: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            v = w;
            lam = norm - 1.0;
            if diff < 1e-15 {
                break;
            }
        }
        let sv: f64 = (0..n).map(|i| (0..n).map(|j| s[i][j] * v[j]).sum::<f64>()).sum();
        let vs: f64 = v.iter().sum();
        if vs > 0.0 {
            lam = sv / vs;
        }
        (lam, v)
    }
}

/// Default primitivity horizon `m^2`.
pub fn default_l_max(m: usize) -> usize {
    (m * m).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitivity_witnesses() {
        let fib = SubstitutionMatrix { s: vec![vec![1, 1], vec![1, 0]] };
        assert_eq!(fib.is_primitive(4), Primitivity::Primitive { l: 2 });
        assert_eq!(fib.pow(2), vec![vec![2, 1], vec![1, 1]]);
        let tri = SubstitutionMatrix { s: vec![vec![1, 0], vec![1, 1]] };
        assert_eq!(tri.is_primitive(50), Primitivity::NotPrimitive { l_max: 50 });
        assert_eq!(SubstitutionMatrix { s: vec![vec![2]] }.is_primitive(1), Primitivity::Primitive { l: 1 });
    }

    #[test]
    fn perron_frobenius_of_nonpisot_matrix() {
        let s = SubstitutionMatrix { s: vec![vec![1, 1], vec![3, 0]] };
        let (lam, v) = s.perron_frobenius();
        let expect = (1.0 + 13f64.sqrt()) / 2.0;
        assert!((lam - expect).abs() < 1e-9);
        assert!((v[0] / v[1] - expect / 3.0).abs() < 1e-9);
    }
}
