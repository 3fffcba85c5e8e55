//! Legality of clusters: `P + t ⊆ Φ^k(x_j)`.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arithmetic::AlgebraicVector;

use super::patch::{Embedding, IntMfs};
use super::system::SubstitutionSystem;
use super::SubstitutionError;

pub const DEFAULT_LEGALITY_K_MAX: usize = 8;
pub const DEFAULT_LEGALITY_POINT_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Legality {
    Legal { color: usize, k: usize, translation: AlgebraicVector },
    /// Inconclusive: no witness up to `k_max` within the point cap.
    NotFound { k_max: usize },
}

impl Legality {
    pub fn is_legal(&self) -> bool {
        matches!(self, Legality::Legal { .. })
    }
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
enum LegalityJson {
    Legal { color: usize, k: usize, translation: Vec<Vec<String>> },
    NotFound { k_max: usize },
}

impl Serialize for Legality {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Legality::Legal { color, k, translation } => {
                LegalityJson::Legal { color: *color, k: *k, translation: translation.coeff_strings() }.serialize(s)
            }
            Legality::NotFound { k_max } => LegalityJson::NotFound { k_max: *k_max }.serialize(s),
        }
    }
}

/// Searches `Φ^k({j at 0})` for `k ≤ k_max` (outer) and colors `j` (inner) for a
/// translate of `cluster`. Patches larger than `max_points` are skipped.
pub fn is_legal(
    sys: &SubstitutionSystem,
    cluster: &[(usize, AlgebraicVector)],
    k_max: usize,
    max_points: usize,
) -> Result<Legality, SubstitutionError> {
    let Some((c0, p0)) = cluster.first() else {
        return Ok(Legality::Legal { color: 0, k: 0, translation: sys.zero_vector() });
    };
    let den = cluster
        .iter()
        .flat_map(|(_, v)| v.flat())
        .fold(sys.digit_denominator(), |acc, x| acc.lcm(x.denom()));
    let den = den.to_i64().ok_or_else(|| SubstitutionError::Overflow("cluster denominator".into()))?;
    let emb = Embedding::new(sys.field(), sys.dimension(), den);
    let mfs = IntMfs::new(sys, &emb)?;
    let rel: Vec<(usize, Vec<i64>)> = cluster
        .iter()
        .map(|(c, v)| Ok((*c, emb.key_of(&v.sub(p0))?)))
        .collect::<Result<_, SubstitutionError>>()?;
    let m = sys.colors();
    let mut patches: Vec<Option<Vec<Vec<Vec<i64>>>>> = (0..m)
        .map(|j| {
            let mut keys = vec![Vec::new(); m];
            keys[j].push(vec![0i64; emb.key_len()]);
            Some(keys)
        })
        .collect();
    for k in 0..=k_max {
        for j in 0..m {
            let Some(patch) = &patches[j] else { continue };
            let sets: Vec<HashSet<&Vec<i64>>> = patch.iter().map(|c| c.iter().collect()).collect();
            for y in &patch[*c0] {
                let ok = rel.iter().all(|(c, r)| {
                    let z: Option<Vec<i64>> = y.iter().zip(r).map(|(a, b)| a.checked_add(*b)).collect();
                    z.is_some_and(|z| sets[*c].contains(&z))
                });
                if ok {
                    let t = emb.vector_of(y).sub(p0);
                    return Ok(Legality::Legal { color: j, k, translation: t });
                }
            }
        }
        if k == k_max {
            break;
        }
        for slot in patches.iter_mut() {
            let next = match slot {
                Some(p) if p.iter().map(Vec::len).sum::<usize>() <= max_points => match mfs.step(p) {
                    Ok(n) => Some(n),
                    Err(SubstitutionError::Overflow(_)) => None,
                    Err(e) => return Err(e),
                },
                _ => None,
            };
            *slot = next;
        }
    }
    Ok(Legality::NotFound { k_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::system;

    fn pt(sys: &SubstitutionSystem, c: &str, e: &str) -> (usize, AlgebraicVector) {
        (sys.color_index(c).unwrap(), sys.vector(&[e]).unwrap())
    }

    #[test]
    fn fibonacci_witnesses() {
        let sys = system("fibonacci");
        let ab = [pt(&sys, "a", "0"), pt(&sys, "b", "t")];
        match is_legal(&sys, &ab, 8, DEFAULT_LEGALITY_POINT_CAP).unwrap() {
            Legality::Legal { color, k, translation } => {
                assert_eq!((color, k), (0, 1));
                assert!(translation.is_zero());
            }
            other => panic!("{other:?}"),
        }
        let single = [pt(&sys, "a", "0")];
        assert!(matches!(is_legal(&sys, &single, 8, 1000).unwrap(), Legality::Legal { k: 0, .. }));
        let bb = [pt(&sys, "b", "0"), pt(&sys, "b", "1")];
        assert_eq!(is_legal(&sys, &bb, 8, DEFAULT_LEGALITY_POINT_CAP).unwrap(), Legality::NotFound { k_max: 8 });
    }
}
