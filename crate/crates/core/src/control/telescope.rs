//! Telescoping decomposition of control-point differences along supertile chains.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::arithmetic::{AlgebraicVector, FieldMatrix};
use crate::substitution::{ColoredPointSet, Embedding, IntMfs, SubstitutionSystem};

use super::tilemap::{ControlPointAtlas, TileMap};
use super::xi::XiModule;
use super::ControlError;

/// Longest supertile chain followed before giving up.
pub const MAX_CHAIN: usize = 256;

/// A tile as `(color, integer key)`.
pub type Tile = (usize, Vec<i64>);

/// `c(T) - c(S) = Σ_{n=0}^{N} Q^{kn} (u(n) + w(n))`.
#[derive(Clone, Debug)]
pub struct Telescope {
    pub depth: usize,
    pub u: Vec<AlgebraicVector>,
    pub w: Vec<AlgebraicVector>,
    /// Indices of `u(n)`, `w(n)` in the finite set `U`.
    pub u_index: Vec<usize>,
    pub w_index: Vec<usize>,
    pub difference: AlgebraicVector,
    /// True when the two chains meet in one supertile.
    pub common_ancestor: bool,
    /// Exact equality of the sum and the difference.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TelescopeSummary {
    pub u_size: usize,
    pub u: Vec<Vec<Vec<String>>>,
    pub cyclic_tiles: usize,
}

/// Precomputed ancestry data for one patch.
pub struct Telescoper<'a> {
    emb: Arc<Embedding>,
    mfs: IntMfs,
    inverse: DMatrix<f64>,
    qk: FieldMatrix,
    offsets: Vec<AlgebraicVector>,
    sets: Vec<HashSet<&'a [i64]>>,
    /// `child_u[p][j][a]`: index in `U` of `a + c_j - Q^k c_p`.
    child_u: Vec<Vec<Vec<usize>>>,
    u: Vec<AlgebraicVector>,
    index: HashMap<AlgebraicVector, usize>,
    cyclic: HashSet<Tile>,
}

fn intern(u: &mut Vec<AlgebraicVector>, index: &mut HashMap<AlgebraicVector, usize>, v: AlgebraicVector) -> usize {
    if let Some(&i) = index.get(&v) {
        return i;
    }
    index.insert(v.clone(), u.len());
    u.push(v);
    u.len() - 1
}

impl<'a> Telescoper<'a> {
    pub fn new(
        sys: &SubstitutionSystem,
        tm: &TileMap,
        atlas: &ControlPointAtlas,
        patch: &'a ColoredPointSet,
    ) -> Result<Self, ControlError> {
        let m = sys.colors();
        if patch.colors() != m || atlas.offsets.len() != m {
            return Err(ControlError::InvalidChoice("patch, atlas and system disagree on the colors".into()));
        }
        let emb = patch.embedding().clone();
        let mfs = IntMfs::new(sys, &emb)?.pow(tm.power)?;
        let n = emb.key_len();
        let qf = DMatrix::from_fn(n, n, |r, c| mfs.q_matrix()[r * n + c] as f64);
        let inverse = qf.clone().try_inverse().ok_or_else(|| ControlError::Singular("Q^k".into()))?;
        let qk = tm.q_power.clone();
        let offsets = atlas.offsets.clone();
        let sets = (0..m).map(|c| patch.points(c).iter().map(|p| p.key.as_slice()).collect()).collect();
        let field = sys.field();
        let mut u = Vec::new();
        let mut index = HashMap::new();
        intern(&mut u, &mut index, AlgebraicVector::zero(field, sys.dimension()));
        let mut child_u = vec![vec![Vec::new(); m]; m];
        for (p, row) in child_u.iter_mut().enumerate() {
            let qc = qk.apply(&offsets[p])?;
            for (j, list) in row.iter_mut().enumerate() {
                for a in mfs.digits(j, p) {
                    let v = emb.vector_of(a).add(&offsets[j]).sub(&qc);
                    intern(&mut u, &mut index, v.neg());
                    list.push(intern(&mut u, &mut index, v));
                }
            }
        }
        let mut t = Telescoper { emb, mfs, inverse, qk, offsets, sets, child_u, u, index, cyclic: HashSet::new() };
        t.find_cycles(patch)?;
        Ok(t)
    }

    /// Tiles fixed by some power of the parent map, and the differences of their control points.
    fn find_cycles(&mut self, patch: &ColoredPointSet) -> Result<(), ControlError> {
        let bound = self.mfs.max_digit_norm() / (self.qk.to_f64().svd(false, false).singular_values.min() - 1.0);
        let radius = if bound.is_finite() && bound > 0.0 { bound + 1e-6 } else { patch.window() };
        let mut candidates: Vec<Tile> = Vec::new();
        for c in 0..patch.colors() {
            for p in patch.points(c) {
                if self.emb.within(&p.key, radius) {
                    candidates.push((c, p.key.clone()));
                }
            }
        }
        if candidates.is_empty() {
            candidates = (0..patch.colors()).flat_map(|c| patch.points(c).iter().map(move |p| (c, p.key.clone()))).collect();
        }
        let limit = candidates.len() + 1;
        for tile in &candidates {
            let mut cur = tile.clone();
            for _ in 0..limit {
                match self.parent(&cur)? {
                    Some((p, _)) => cur = p,
                    None => break,
                }
                if &cur == tile {
                    self.cyclic.insert(tile.clone());
                    break;
                }
            }
        }
        let cyc: Vec<Tile> = self.cyclic.iter().cloned().collect();
        for a in &cyc {
            for b in &cyc {
                let v = self.control_difference(a, b);
                intern(&mut self.u, &mut self.index, v);
            }
        }
        Ok(())
    }

    /// The finite set `U` (contains `0`, closed under negation on the child part).
    pub fn u_set(&self) -> &[AlgebraicVector] {
        &self.u
    }

    pub fn cyclic_tiles(&self) -> usize {
        self.cyclic.len()
    }

    pub fn summary(&self) -> TelescopeSummary {
        TelescopeSummary {
            u_size: self.u.len(),
            u: self.u.iter().map(|v| v.coeff_strings()).collect(),
            cyclic_tiles: self.cyclic.len(),
        }
    }

    /// Whether `Q U` and `Q^k U` lie in the translation group.
    pub fn u_in_group(&self, q: &FieldMatrix, xi: &XiModule) -> Result<(bool, bool), ControlError> {
        let mut a = true;
        let mut b = true;
        for v in &self.u {
            a &= xi.contains(&q.apply(v)?);
            b &= xi.contains(&self.qk.apply(v)?);
        }
        Ok((a, b))
    }

    fn contains(&self, t: &Tile) -> bool {
        self.sets[t.0].contains(t.1.as_slice())
    }

    /// The supertile containing `t` and the index of the digit placing `t` inside it.
    pub fn parent(&self, t: &Tile) -> Result<Option<(Tile, usize)>, ControlError> {
        let (j, x) = t;
        let n = self.emb.key_len();
        for p in 0..self.sets.len() {
            for (idx, a) in self.mfs.digits(*j, p).iter().enumerate() {
                let diff = DVector::from_iterator(n, x.iter().zip(a).map(|(u, v)| (u - v) as f64));
                let y: Vec<i64> = (&self.inverse * diff).iter().map(|v| v.round() as i64).collect();
                let Some(qy) = self.mfs.apply_q(&y) else { continue };
                if qy.iter().zip(a).zip(x.iter()).all(|((q, a), x)| q.checked_add(*a) == Some(*x)) {
                    let cand = (p, y);
                    if self.contains(&cand) {
                        return Ok(Some((cand, idx)));
                    }
                }
            }
        }
        Ok(None)
    }

    fn control_difference(&self, t: &Tile, s: &Tile) -> AlgebraicVector {
        let diff: Vec<i64> = t.1.iter().zip(&s.1).map(|(a, b)| a - b).collect();
        self.emb.vector_of(&diff).add(&self.offsets[t.0]).sub(&self.offsets[s.0])
    }

    fn step(&self, t: &Tile) -> Result<(Tile, usize), ControlError> {
        let (p, idx) = self.parent(t)?.ok_or_else(|| {
            ControlError::NoCommonAncestor(format!("the supertile of {} is missing", self.emb.vector_of(&t.1)))
        })?;
        let ui = self.child_u[p.0][t.0][idx];
        Ok((p, ui))
    }

    /// Decomposes `c(T) - c(S)` for tiles `(color, key)` of the patch.
    pub fn telescope(&self, t: &Tile, s: &Tile) -> Result<Telescope, ControlError> {
        for x in [t, s] {
            if !self.contains(x) {
                return Err(ControlError::InvalidChoice(format!("{} is not a tile of the patch", self.emb.vector_of(&x.1))));
            }
        }
        let mut a = t.clone();
        let mut b = s.clone();
        let mut u_index = Vec::new();
        let mut w_index = Vec::new();
        let common;
        loop {
            if a == b {
                common = true;
                break;
            }
            if self.cyclic.contains(&a) && self.cyclic.contains(&b) {
                common = false;
                break;
            }
            if u_index.len() >= MAX_CHAIN {
                return Err(ControlError::NoCommonAncestor(format!("chains longer than {MAX_CHAIN}")));
            }
            let (pa, ua) = self.step(&a)?;
            let (pb, ub) = self.step(&b)?;
            u_index.push(ua);
            let neg = self.u[ub].neg();
            w_index.push(*self.index.get(&neg).expect("U is closed under negation on child terms"));
            a = pa;
            b = pb;
        }
        let top = self.control_difference(&a, &b);
        let ti = *self
            .index
            .get(&top)
            .ok_or_else(|| ControlError::Property(format!("top-level difference {top} outside U")))?;
        u_index.push(ti);
        w_index.push(0);
        let u: Vec<AlgebraicVector> = u_index.iter().map(|&i| self.u[i].clone()).collect();
        let w: Vec<AlgebraicVector> = w_index.iter().map(|&i| self.u[i].clone()).collect();
        let mut acc = u.last().expect("nonempty").add(w.last().expect("nonempty"));
        for n in (0..u.len() - 1).rev() {
            acc = self.qk.apply(&acc)?.add(&u[n]).add(&w[n]);
        }
        let difference = self.control_difference(t, s);
        Ok(Telescope {
            depth: u.len() - 1,
            exact: acc == difference,
            u,
            w,
            u_index,
            w_index,
            difference,
            common_ancestor: common,
        })
    }
}

/// One-shot form of [`Telescoper::telescope`].
pub fn telescope_decomposition(
    sys: &SubstitutionSystem,
    tm: &TileMap,
    atlas: &ControlPointAtlas,
    t: &(usize, AlgebraicVector),
    s: &(usize, AlgebraicVector),
    patch: &ColoredPointSet,
) -> Result<Telescope, ControlError> {
    let tel = Telescoper::new(sys, tm, atlas, patch)?;
    let emb = patch.embedding();
    let tk = (t.0, emb.key_of(&t.1)?);
    let sk = (s.0, emb.key_of(&s.1)?);
    tel.telescope(&tk, &sk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::control::{build_tile_map, control_offsets, xi_observe};
    use crate::substitution::generate_patch;

    #[test]
    fn fibonacci_pairs_reconstruct_exactly() {
        let sys = catalog::system("fibonacci");
        let tm = build_tile_map(&sys, 2).unwrap();
        let atlas = control_offsets(&sys, &tm).unwrap();
        let patch = generate_patch(&sys, 30.0).unwrap();
        let tel = Telescoper::new(&sys, &tm, &atlas, &patch).unwrap();
        assert!(tel.u_set()[0].is_zero());
        let a = (0, sys.vector(&["0"]).unwrap());
        let same = telescope_decomposition(&sys, &tm, &atlas, &a, &a, &patch).unwrap();
        assert!(same.exact && same.difference.is_zero());
        let b = (1, sys.vector(&["t"]).unwrap());
        let t = telescope_decomposition(&sys, &tm, &atlas, &b, &a, &patch).unwrap();
        assert!(t.exact);
        assert_eq!(t.difference, sys.vector(&["t"]).unwrap());
        let xi = xi_observe(&sys, &patch).unwrap();
        assert_eq!(tel.u_in_group(&tm.q_power, &xi).unwrap(), (true, true));
    }

    #[test]
    fn tiles_outside_the_patch_are_rejected() {
        let sys = catalog::system("fibonacci");
        let tm = build_tile_map(&sys, 2).unwrap();
        let atlas = control_offsets(&sys, &tm).unwrap();
        let patch = generate_patch(&sys, 10.0).unwrap();
        let far = (0, sys.vector(&["100"]).unwrap());
        let a = (0, sys.vector(&["0"]).unwrap());
        assert!(telescope_decomposition(&sys, &tm, &atlas, &far, &a, &patch).is_err());
    }
}
