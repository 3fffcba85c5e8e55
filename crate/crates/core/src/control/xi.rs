//! The group generated by same-type translation vectors, and the control-point
//! translation check.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::lattice::RationalLattice;
use crate::arithmetic::AlgebraicVector;
use crate::spectral::{algebraic_integer_check, IntegerCheck, IntegerCheckFailure, SpectralError};
use crate::substitution::{ColoredPointSet, SubstitutionSystem};

use super::tilemap::{ControlPointAtlas, TileMap};
use super::ControlError;

/// Points per color used for the explicit list of observed translations.
pub const OBSERVED_POINTS_PER_COLOR: usize = 64;

#[derive(Clone, Debug)]
pub struct XiModule {
    /// Reduced basis of the group generated by same-color differences.
    pub generators: Vec<AlgebraicVector>,
    /// Distinct same-color differences among the points nearest the origin.
    pub observed: Vec<AlgebraicVector>,
    /// Rank of the real span of the generators.
    pub real_rank: usize,
    pub full_rank: bool,
    /// Integer matrix of `Q` on the generators, when it exists.
    pub closure: Option<Result<IntegerCheck, IntegerCheckFailure>>,
    lattice: RationalLattice,
}

#[derive(Clone, Debug, Serialize)]
pub struct XiSummary {
    pub generators: Vec<(Vec<Vec<String>>, Vec<f64>)>,
    pub observed: usize,
    pub real_rank: usize,
    pub full_rank: bool,
    pub closed_under_q: bool,
    pub m: Option<Vec<Vec<i64>>>,
    pub charpoly_m: Option<Vec<String>>,
}

impl XiModule {
    /// Exact membership in the generated group.
    pub fn contains(&self, v: &AlgebraicVector) -> bool {
        self.lattice.contains(&v.flat())
    }

    /// Integer coordinates in the basis `generators`.
    pub fn coordinates(&self, v: &AlgebraicVector) -> Option<Vec<num_bigint::BigInt>> {
        self.lattice.coordinates(&v.flat())
    }

    pub fn closed_under_q(&self) -> bool {
        matches!(self.closure, Some(Ok(_)))
    }

    pub fn summary(&self) -> XiSummary {
        let check = match &self.closure {
            Some(Ok(c)) => Some(c),
            _ => None,
        };
        XiSummary {
            generators: self.generators.iter().map(|g| (g.coeff_strings(), g.to_f64_accurate())).collect(),
            observed: self.observed.len(),
            real_rank: self.real_rank,
            full_rank: self.full_rank,
            closed_under_q: self.closed_under_q(),
            m: check.map(|c| c.m.clone()),
            charpoly_m: check.map(|c| c.charpoly_m.clone()),
        }
    }
}

fn by_norm(points: &ColoredPointSet, c: usize) -> Vec<&[i64]> {
    let mut v: Vec<(f64, &[i64])> =
        points.points(c).iter().map(|p| (p.pos.iter().map(|x| x * x).sum::<f64>(), p.key.as_slice())).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    v.into_iter().map(|t| t.1).collect()
}

/// Same-color translation vectors of a patch, the group they generate and its
/// closure under `Q`.
pub fn xi_observe(sys: &SubstitutionSystem, patch: &ColoredPointSet) -> Result<XiModule, ControlError> {
    if patch.colors() != sys.colors() {
        return Err(ControlError::InvalidChoice("patch and system disagree on the colors".into()));
    }
    let emb = patch.embedding();
    let field = sys.field();
    let d = sys.dimension();
    let n = emb.key_len();
    let mut lattice = RationalLattice::from_generators(n, &[]);
    let mut observed: HashSet<Vec<i64>> = HashSet::new();
    for c in 0..patch.colors() {
        let pts = by_norm(patch, c);
        let Some(x0) = pts.first() else { continue };
        for x in &pts[1..] {
            let diff: Vec<i64> = x.iter().zip(x0.iter()).map(|(a, b)| a - b).collect();
            let flat = emb.vector_of(&diff).flat();
            if !lattice.contains(&flat) {
                let mut gens = lattice.basis();
                gens.push(flat);
                lattice = RationalLattice::from_generators(n, &gens);
            }
        }
        let near = &pts[..pts.len().min(OBSERVED_POINTS_PER_COLOR)];
        for x in near {
            for y in near {
                if x != y {
                    observed.insert(x.iter().zip(y.iter()).map(|(a, b)| a - b).collect());
                }
            }
        }
    }
    let generators: Vec<AlgebraicVector> =
        lattice.basis().iter().map(|b| AlgebraicVector::from_flat(field, b)).collect();
    let real_rank = if generators.is_empty() {
        0
    } else {
        DMatrix::from_fn(d, generators.len(), |i, j| generators[j].entries()[i].to_f64_accurate()).rank(1e-9)
    };
    let closure = match algebraic_integer_check(&generators, sys.q()) {
        Ok(r) => Some(r),
        Err(SpectralError::Rank(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut observed: Vec<Vec<i64>> = observed.into_iter().collect();
    observed.sort();
    Ok(XiModule {
        generators,
        observed: observed.iter().map(|k| emb.vector_of(k)).collect(),
        real_rank,
        full_rank: real_rank == d,
        closure,
        lattice,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlTranslation {
    pub tiles: usize,
    /// `Q^k (c(T) - c(S))` lies in the group for every pair, `k` the tile-map power.
    pub holds: bool,
    /// The same with `Q` itself.
    pub holds_base_q: bool,
    /// A failing pair `(T, S)` for `Q^k`.
    pub witness: Option<(String, String)>,
}

/// Checks `Q^k (c(T) - c(S)) ∈ Ξ` for all tile pairs of the patch, by comparing
/// every tile against one reference tile.
pub fn verify_control_translation(
    sys: &SubstitutionSystem,
    tm: &TileMap,
    atlas: &ControlPointAtlas,
    patch: &ColoredPointSet,
    xi: &XiModule,
) -> Result<ControlTranslation, ControlError> {
    if atlas.offsets.len() != patch.colors() || tm.colors() != patch.colors() {
        return Err(ControlError::InvalidChoice("atlas and patch disagree on the colors".into()));
    }
    let emb = patch.embedding();
    let names = patch.color_names();
    let mut tiles: Vec<(usize, &[i64])> = Vec::new();
    for c in 0..patch.colors() {
        tiles.extend(by_norm(patch, c).into_iter().map(|k| (c, k)));
    }
    let Some(&(c0, x0)) = tiles.iter().min_by(|a, b| {
        let na: f64 = emb.position(a.1).iter().map(|x| x * x).sum();
        let nb: f64 = emb.position(b.1).iter().map(|x| x * x).sum();
        na.total_cmp(&nb)
    }) else {
        return Ok(ControlTranslation { tiles: 0, holds: true, holds_base_q: true, witness: None });
    };
    let label = |c: usize, k: &[i64]| format!("{}@{}", names[c], emb.vector_of(k));
    let q = sys.q();
    let qk = &tm.q_power;
    let results: Vec<Result<(bool, bool), ControlError>> = tiles
        .par_iter()
        .map(|&(c, x)| {
            let diff: Vec<i64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
            let dc = emb.vector_of(&diff).add(&atlas.offsets[c]).sub(&atlas.offsets[c0]);
            Ok((xi.contains(&qk.apply(&dc)?), xi.contains(&q.apply(&dc)?)))
        })
        .collect();
    let mut holds = true;
    let mut holds_q = true;
    let mut witness = None;
    for (t, r) in tiles.iter().zip(results) {
        let (a, b) = r?;
        holds_q &= b;
        if !a && holds {
            holds = false;
            witness = Some((label(t.0, t.1), label(c0, x0)));
        }
    }
    Ok(ControlTranslation { tiles: tiles.len(), holds, holds_base_q: holds_q, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lattice_has_one_generator() {
        let sys = crate::catalog::system("integer_doubling");
        let z = ColoredPointSet::lattice_cube(1, 20);
        let xi = xi_observe(&sys, &z).unwrap();
        assert_eq!(xi.generators.len(), 1);
        assert_eq!(xi.generators[0], sys.vector(&["1"]).unwrap());
        assert!(xi.full_rank && xi.closed_under_q());
    }

    #[test]
    fn corrupted_offsets_break_the_translation_property() {
        use crate::control::{build_tile_map, control_offsets};
        let sys = crate::catalog::system("fibonacci");
        let patch = crate::substitution::generate_patch(&sys, 50.0).unwrap();
        let tm = build_tile_map(&sys, 2).unwrap();
        let mut atlas = control_offsets(&sys, &tm).unwrap();
        let xi = xi_observe(&sys, &patch).unwrap();
        assert!(verify_control_translation(&sys, &tm, &atlas, &patch, &xi).unwrap().holds);
        atlas.offsets[1] = atlas.offsets[1].add(&sys.vector(&["1/3"]).unwrap());
        let v = verify_control_translation(&sys, &tm, &atlas, &patch, &xi).unwrap();
        assert!(!v.holds && v.witness.is_some());
    }
}
