//! The tile map `γ` on `ω^k` and the control-point offsets it determines.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arithmetic::{AlgebraicVector, FieldMatrix, RationalMatrix};
use crate::substitution::{default_l_max, Primitivity, SubstitutionSystem};

use super::ControlError;

/// For every parent color `j`, a designated child `γ(T_j) = a* + T_{i*}` inside `ω^k(T_j)`.
#[derive(Clone, Debug)]
pub struct TileMap {
    pub power: usize,
    pub color_names: Vec<String>,
    /// `choice[j] = (i*, a*)`.
    pub choice: Vec<(usize, AlgebraicVector)>,
    /// Composed digit sets `D^(k)_{ij}`, sorted lexicographically.
    pub digits: Vec<Vec<Vec<AlgebraicVector>>>,
    /// `Q^k`.
    pub q_power: FieldMatrix,
}

impl TileMap {
    pub fn colors(&self) -> usize {
        self.choice.len()
    }

    /// Color of `γ(T_j)`.
    pub fn image_color(&self, j: usize) -> usize {
        self.choice[j].0
    }

    /// True when every `γ(T_j)` has one and the same color.
    pub fn single_target(&self) -> bool {
        self.choice.iter().all(|(i, _)| *i == self.choice[0].0)
    }
}

/// Digit sets of `ω^k`: `D^(k)_{ij} = ∪_l (Q D^(k-1)_{lj} + D_{il})`.
pub fn compose_digits(sys: &SubstitutionSystem, k: usize) -> Result<Vec<Vec<Vec<AlgebraicVector>>>, ControlError> {
    let m = sys.colors();
    let q = sys.q();
    let base: Vec<Vec<Vec<AlgebraicVector>>> = sys.digits().to_vec();
    let mut acc = base.clone();
    for _ in 1..k {
        let mut next = vec![vec![Vec::new(); m]; m];
        for (i, row) in next.iter_mut().enumerate() {
            for (j, set) in row.iter_mut().enumerate() {
                for l in 0..m {
                    for b in &acc[l][j] {
                        let qb = q.apply(b)?;
                        for a in &base[i][l] {
                            set.push(qb.add(a));
                        }
                    }
                }
            }
        }
        acc = next;
    }
    for row in &mut acc {
        for set in row.iter_mut() {
            set.sort_by(|a, b| a.lex_cmp(b));
        }
    }
    Ok(acc)
}

/// Tile map on `ω^k` sending every tile to a child of the first color, the
/// lexicographically smallest one.
pub fn build_tile_map(sys: &SubstitutionSystem, power_k: usize) -> Result<TileMap, ControlError> {
    build_tile_map_with(sys, power_k, &vec![None; sys.colors()])
}

/// Like [`build_tile_map`], with optional per-color overrides `(child color, index into D^(k)_{ij})`.
pub fn build_tile_map_with(
    sys: &SubstitutionSystem,
    power_k: usize,
    overrides: &[Option<(usize, usize)>],
) -> Result<TileMap, ControlError> {
    let m = sys.colors();
    if overrides.len() != m {
        return Err(ControlError::InvalidChoice(format!("expected {m} overrides, got {}", overrides.len())));
    }
    let witness = match sys.substitution_matrix().is_primitive(default_l_max(m)) {
        Primitivity::Primitive { l } => l,
        Primitivity::NotPrimitive { l_max } => return Err(ControlError::NotPrimitive { l_max }),
    };
    if power_k < witness {
        return Err(ControlError::PowerTooSmall { power: power_k, witness });
    }
    let digits = compose_digits(sys, power_k)?;
    let mut choice = Vec::with_capacity(m);
    for j in 0..m {
        let pick = match overrides[j] {
            Some((i, idx)) => {
                let set = digits.get(i).map(|r| &r[j]).ok_or_else(|| {
                    ControlError::InvalidChoice(format!("color index {i} out of range"))
                })?;
                let a = set.get(idx).ok_or_else(|| {
                    ControlError::InvalidChoice(format!("digit {idx} of D({i},{j}) does not exist"))
                })?;
                (i, a.clone())
            }
            None => {
                let a = digits[0][j].first().ok_or_else(|| {
                    ControlError::InvalidChoice(format!("no child of color 0 in the image of color {j}"))
                })?;
                (0, a.clone())
            }
        };
        choice.push(pick);
    }
    Ok(TileMap {
        power: power_k,
        color_names: sys.color_names().to_vec(),
        choice,
        digits,
        q_power: sys.q().pow(power_k as u32),
    })
}

/// Smallest multiple of the fixed-point period that reaches the primitivity witness.
pub fn tile_map_power(witness: usize, period: usize) -> usize {
    let p = period.max(1);
    witness.max(1).div_ceil(p) * p
}

/// Per-color offsets with `c(x + T_j) = x + c_j`.
#[derive(Clone, Debug)]
pub struct ControlPointAtlas {
    pub power: usize,
    pub offsets: Vec<AlgebraicVector>,
    /// Cycles of the color map `j ↦ γ(j)`.
    pub cycles: Vec<Vec<usize>>,
    /// For colors on a cycle, the position of the tile fixed by `γ^p`.
    pub fixed_tiles: Vec<Option<AlgebraicVector>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasSummary {
    pub power: usize,
    pub offsets: Vec<(String, Vec<Vec<String>>, Vec<f64>)>,
    pub cycles: Vec<Vec<String>>,
}

impl ControlPointAtlas {
    /// Control point of the tile of color `j` at `x`.
    pub fn control_point(&self, j: usize, x: &AlgebraicVector) -> AlgebraicVector {
        x.add(&self.offsets[j])
    }

    pub fn summary(&self, names: &[String]) -> AtlasSummary {
        AtlasSummary {
            power: self.power,
            offsets: self
                .offsets
                .iter()
                .enumerate()
                .map(|(j, c)| (names[j].clone(), c.coeff_strings(), c.to_f64_accurate()))
                .collect(),
            cycles: self.cycles.iter().map(|c| c.iter().map(|&j| names[j].clone()).collect()).collect(),
        }
    }
}

fn flat_vector(tm: &TileMap, flat: &[BigRational]) -> AlgebraicVector {
    AlgebraicVector::from_flat(tm.q_power.field(), flat)
}

/// Solves `Q^k c_j = a*_j + c_{γ(j)}` exactly and checks the identity.
pub fn control_offsets(sys: &SubstitutionSystem, tm: &TileMap) -> Result<ControlPointAtlas, ControlError> {
    let m = tm.colors();
    if sys.colors() != m {
        return Err(ControlError::InvalidChoice("tile map and system disagree on the colors".into()));
    }
    let reg = tm.q_power.regular_representation();
    let n = reg.rows();
    let g: Vec<usize> = (0..m).map(|j| tm.image_color(j)).collect();
    let a: Vec<Vec<BigRational>> = tm.choice.iter().map(|(_, v)| v.flat()).collect();
    let mut offsets: Vec<Option<Vec<BigRational>>> = vec![None; m];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut on_cycle = vec![false; m];
    for start in 0..m {
        // walk until a repeat; the repeated tail is a cycle
        let mut path = vec![start];
        while !path[..path.len() - 1].contains(path.last().expect("nonempty")) {
            let next = g[*path.last().expect("nonempty")];
            path.push(next);
        }
        let last = *path.last().expect("nonempty");
        let first = path.iter().position(|&x| x == last).expect("present");
        let cycle: Vec<usize> = path[first..path.len() - 1].to_vec();
        if on_cycle[cycle[0]] {
            continue;
        }
        let p = cycle.len();
        // (R^p - I) c_0 = Σ_t R^{p-1-t} a_t
        let mut rhs = vec![BigRational::zero(); n];
        let mut power = RationalMatrix::identity(n);
        for t in (0..p).rev() {
            let term = power.mul_vec(&a[cycle[t]]);
            rhs.iter_mut().zip(term).for_each(|(x, y)| *x += y);
            power = power.mul(&reg);
        }
        let lhs = power.sub(&RationalMatrix::identity(n));
        let c0 = lhs
            .solve(&rhs)
            .ok_or_else(|| ControlError::Singular(format!("Q^{} - I along a cycle of length {p}", tm.power * p)))?;
        let mut c = c0;
        for t in 0..p {
            on_cycle[cycle[t]] = true;
            offsets[cycle[t]] = Some(c.clone());
            let rc = reg.mul_vec(&c);
            c = rc.iter().zip(&a[cycle[t]]).map(|(x, y)| x - y).collect();
        }
        cycles.push(cycle);
    }
    let inv = reg.inverse().ok_or_else(|| ControlError::Singular("Q^k".into()))?;
    // remaining colors feed into a cycle after finitely many steps
    while offsets.iter().any(|o| o.is_none()) {
        for j in 0..m {
            if offsets[j].is_none() {
                if let Some(cg) = offsets[g[j]].clone() {
                    let rhs: Vec<BigRational> = a[j].iter().zip(&cg).map(|(x, y)| x + y).collect();
                    offsets[j] = Some(inv.mul_vec(&rhs));
                }
            }
        }
    }
    let offsets: Vec<AlgebraicVector> = offsets.into_iter().map(|o| flat_vector(tm, &o.expect("solved"))).collect();
    for j in 0..m {
        let lhs = tm.q_power.apply(&offsets[j])?;
        let rhs = tm.choice[j].1.add(&offsets[g[j]]);
        if lhs != rhs {
            return Err(ControlError::Property(format!("Q^k c_{j} differs from the control point of the image tile")));
        }
    }
    let mut fixed_tiles = vec![None; m];
    for j in (0..m).filter(|&j| on_cycle[j]) {
        fixed_tiles[j] = Some(offsets[j].neg());
    }
    Ok(ControlPointAtlas { power: tm.power, offsets, cycles, fixed_tiles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn fibonacci_offsets() {
        let sys = catalog::system("fibonacci");
        let tm = build_tile_map(&sys, 2).unwrap();
        assert!(tm.single_target());
        assert!(tm.choice[0].1.is_zero() && tm.choice[1].1.is_zero());
        assert_eq!(tm.digits[0][0].len(), 2);
        let atlas = control_offsets(&sys, &tm).unwrap();
        assert!(atlas.offsets.iter().all(|c| c.is_zero()));
        assert_eq!(atlas.cycles, vec![vec![0]]);
    }

    #[test]
    fn offsets_follow_the_affine_fixed_point() {
        let sys = catalog::system("integer_doubling").with_digit_set(0, 0, vec![catalog::system("integer_doubling").vector(&["1"]).unwrap()]);
        let tm = build_tile_map(&sys, 1).unwrap();
        let atlas = control_offsets(&sys, &tm).unwrap();
        assert_eq!(atlas.offsets[0], sys.vector(&["1"]).unwrap());
        assert_eq!(atlas.fixed_tiles[0], Some(sys.vector(&["-1"]).unwrap()));
        assert_eq!(tile_map_power(1, 2), 2);
        assert_eq!(tile_map_power(3, 2), 4);
    }

    #[test]
    fn power_below_witness_rejected() {
        let sys = catalog::system("fibonacci");
        assert!(matches!(build_tile_map(&sys, 1), Err(ControlError::PowerTooSmall { power: 1, witness: 2 })));
        let bad = catalog::system("nonprimitive");
        assert!(matches!(build_tile_map(&bad, 3), Err(ControlError::NotPrimitive { .. })));
    }
}
