//! Finitely generated subgroups of `Q^n` via Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row Hermite normal form of the integer row vectors `rows`; zero rows dropped.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(n) = rows.first().map(|r| r.len()) else { return Vec::new() };
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        if pivot_row >= m.len() {
            break;
        }
        loop {
            // row with the smallest nonzero entry in this column
            let best = (pivot_row..m.len())
                .filter(|&i| !m[i][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
            let Some(best) = best else { break };
            m.swap(pivot_row, best);
            let mut done = true;
            for i in pivot_row + 1..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = m[i][col].div_floor(&m[pivot_row][col]);
                let prow = m[pivot_row].clone();
                for (x, p) in m[i].iter_mut().zip(&prow) {
                    *x -= &q * p;
                }
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && !m[pivot_row][col].is_zero() {
            if m[pivot_row][col].is_negative() {
                for x in m[pivot_row].iter_mut() {
                    *x = -&*x;
                }
            }
            let prow = m[pivot_row].clone();
            for i in 0..pivot_row {
                let q = m[i][col].div_floor(&prow[col]);
                if !q.is_zero() {
                    for (x, p) in m[i].iter_mut().zip(&prow) {
                        *x -= &q * p;
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    m
}

/// The group generated by a finite set of rational vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLattice {
    dim: usize,
    denom: BigInt,
    /// Echelon basis, scaled by `denom`.
    basis: Vec<Vec<BigInt>>,
}

impl RationalLattice {
    pub fn from_generators(dim: usize, gens: &[Vec<BigRational>]) -> Self {
        let denom = gens
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.iter().map(|x| (x * BigRational::from_integer(denom.clone())).to_integer()).collect())
            .collect();
        let basis = if rows.is_empty() { Vec::new() } else { hermite_normal_form(&rows) };
        RationalLattice { dim, denom, basis }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<Vec<BigRational>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| BigRational::new(x.clone(), self.denom.clone())).collect())
            .collect()
    }

    /// Integer coordinates of `v` in the basis, or `None` when `v` is outside the group.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigInt>> {
        let scaled: Vec<BigRational> = v.iter().map(|x| x * BigRational::from_integer(self.denom.clone())).collect();
        if scaled.iter().any(|x| !x.is_integer()) {
            return None;
        }
        let mut rem: Vec<BigInt> = scaled.iter().map(|x| x.to_integer()).collect();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
            let (q, r) = rem[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rem.iter_mut().zip(row) {
                *x -= &q * b;
            }
            coords.push(q);
        }
        rem.iter().all(|x| x.is_zero()).then_some(coords)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.coordinates(v).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::{int, rat};

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_of_redundant_generators() {
        let h = hermite_normal_form(&[bi(&[2, 0]), bi(&[3, 0]), bi(&[0, 4]), bi(&[1, 6])]);
        assert_eq!(h, vec![bi(&[1, 0]), bi(&[0, 2])]);
    }

    #[test]
    fn membership_with_denominators() {
        let l = RationalLattice::from_generators(2, &[vec![rat(1, 2), int(0)], vec![int(0), int(1)], vec![int(1), int(1)]]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&[rat(3, 2), int(-4)]));
        assert!(!l.contains(&[rat(1, 3), int(0)]));
        let c = l.coordinates(&[rat(3, 2), int(2)]).unwrap();
        let b = l.basis();
        let back: Vec<BigRational> = (0..2)
            .map(|j| c.iter().zip(&b).fold(BigRational::zero(), |acc, (ci, row)| acc + BigRational::from_integer(ci.clone()) * &row[j]))
            .collect();
        assert_eq!(back, vec![rat(3, 2), int(2)]);
    }
}
