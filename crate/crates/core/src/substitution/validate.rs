//! Iteration of `Φ` on seeds and system validation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::geometry::neighbors::min_pair_distance;

use super::generating::{find_generating, GeneratingMode};
use super::patch::{ColoredPointSet, Embedding, IntMfs};
use super::system::SubstitutionSystem;
use super::SubstitutionError;

/// Embedding for `sys` that can also hold the points of `seed`.
pub(crate) fn joint_embedding(
    sys: &SubstitutionSystem,
    extra_denom: i64,
) -> Result<Arc<Embedding>, SubstitutionError> {
    let den = sys.digit_denominator().lcm(&BigInt::from(extra_denom));
    let den = den.to_i64().ok_or_else(|| SubstitutionError::Overflow("common denominator".into()))?;
    Ok(Embedding::new(sys.field(), sys.dimension(), den))
}

pub(crate) fn rekey(set: &ColoredPointSet, emb: &Arc<Embedding>) -> Result<Vec<Vec<Vec<i64>>>, SubstitutionError> {
    (0..set.colors())
        .map(|c| set.vectors(c).iter().map(|v| emb.key_of(v)).collect::<Result<Vec<_>, _>>())
        .collect()
}

fn check_seed(sys: &SubstitutionSystem, seed: &ColoredPointSet) -> Result<(), SubstitutionError> {
    if seed.colors() != sys.colors() || seed.dim() != sys.dimension() {
        return Err(SubstitutionError::Inconsistent("seed does not match the system's colors or dimension".into()));
    }
    if !seed.embedding().field().same_as(sys.field()) {
        return Err(SubstitutionError::Inconsistent("seed lives in a different number field".into()));
    }
    Ok(())
}

/// Smallest singular value of `Q` (floating point).
pub(crate) fn sigma_min(sys: &SubstitutionSystem) -> f64 {
    let q = sys.q_f64();
    q.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Exact image `Φ^k(seed)`; duplicates within one color are an error.
pub fn iterate_phi(
    sys: &SubstitutionSystem,
    seed: &ColoredPointSet,
    k: usize,
) -> Result<ColoredPointSet, SubstitutionError> {
    check_seed(sys, seed)?;
    if seed.is_empty() {
        return Err(SubstitutionError::Inconsistent("seed is empty".into()));
    }
    if k == 0 {
        return Ok(seed.clone());
    }
    let emb = joint_embedding(sys, seed.embedding().denom())?;
    let mfs = IntMfs::new(sys, &emb)?;
    let mut keys = rekey(seed, &emb)?;
    for _ in 0..k {
        keys = mfs.step(&keys)?;
    }
    let window = seed.window() * sigma_min(sys).powi(k as i32);
    ColoredPointSet::from_keys(&emb, sys.color_names().to_vec(), keys, window)
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub expansive: bool,
    /// Certified lower bound on the smallest eigenvalue modulus.
    pub min_eigenvalue_modulus: f64,
    pub check_depth: usize,
    pub seed: String,
    /// Per depth, per color point counts of `Φ^k(seed)`.
    pub image_counts: Vec<Vec<usize>>,
    pub cross_color_coincidences: usize,
    pub min_gap: f64,
    pub max_nearest_neighbour_gap: f64,
    pub valid: bool,
}

/// Checks expansiveness, disjointness of the unions on iterated seeds and Delone sanity.
pub fn validate_system(sys: &SubstitutionSystem, check_depth: usize) -> Result<ValidationReport, SubstitutionError> {
    let spec = sys.spectral()?;
    let min_mod = spec.eigenvalues.iter().map(|e| e.modulus_bounds().0).fold(f64::INFINITY, f64::min);
    if min_mod <= 1.0 {
        let worst = spec
            .eigenvalues
            .iter()
            .min_by(|a, b| a.modulus_bounds().0.total_cmp(&b.modulus_bounds().0))
            .expect("at least one eigenvalue");
        return Err(SubstitutionError::NotExpansive(format!(
            "eigenvalue {:.12} {:+.12}i has modulus {:.12} (not certified > 1)",
            worst.re,
            worst.im,
            worst.z().norm()
        )));
    }
    let emb = Embedding::for_system(sys)?;
    let (seed_keys, seed_desc) = match find_generating(sys, 10.0, 8, GeneratingMode::Smallest) {
        Ok(g) => {
            let desc = g.describe();
            (g.rekeyed(&emb)?, desc)
        }
        Err(_) => {
            let mut keys = vec![Vec::new(); sys.colors()];
            keys[0].push(vec![0i64; emb.key_len()]);
            (keys, format!("{} at origin", sys.color_names()[0]))
        }
    };
    let mfs = IntMfs::new(sys, &emb)?;
    let mut keys = seed_keys;
    let mut counts = vec![keys.iter().map(Vec::len).collect::<Vec<_>>()];
    for _ in 0..check_depth {
        keys = mfs.step(&keys)?;
        counts.push(keys.iter().map(Vec::len).collect());
        if keys.iter().map(Vec::len).sum::<usize>() > 2_000_000 {
            break;
        }
    }
    let set = ColoredPointSet::from_keys(&emb, sys.color_names().to_vec(), keys, 0.0)?;
    let union: Vec<Vec<f64>> = set.union().into_iter().map(|p| p.pos).collect();
    let min_gap = min_pair_distance(&union).map_or(f64::INFINITY, |t| t.0);
    let max_nn = if union.len() < 2 {
        0.0
    } else {
        let index = crate::geometry::neighbors::GridIndex::auto(&union);
        union
            .iter()
            .enumerate()
            .filter_map(|(i, p)| index.nearest(p, Some(i)).map(|t| t.0))
            .fold(0.0, f64::max)
    };
    Ok(ValidationReport {
        expansive: true,
        min_eigenvalue_modulus: min_mod,
        check_depth,
        seed: seed_desc,
        image_counts: counts,
        cross_color_coincidences: set.cross_color_coincidences(),
        min_gap,
        max_nearest_neighbour_gap: max_nn,
        valid: min_gap > 0.0 && max_nn.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::system;

    #[test]
    fn fibonacci_is_valid() {
        let r = validate_system(&system("fibonacci"), 6).unwrap();
        assert!(r.valid && r.expansive);
        assert_eq!(r.image_counts.len(), 7);
    }

    #[test]
    fn repeated_a_points_are_flagged() {
        let sys = system("fibonacci");
        let bad = sys.with_digit_set(1, 0, vec![sys.vector(&["0"]).unwrap()]);
        match validate_system(&bad, 6) {
            Err(SubstitutionError::Overlap { color, point, .. }) => {
                assert_eq!(color, "a");
                assert_eq!(point, "(0)");
            }
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn contracting_map_is_rejected() {
        let src = r#"{"name":"half","dimension":1,"colors":1,"Q":[["1/2"]],"digits":[[[["0"]]]]}"#;
        let sys = SubstitutionSystem::from_json(src).unwrap();
        assert!(matches!(validate_system(&sys, 3), Err(SubstitutionError::NotExpansive(_))));
    }

    #[test]
    fn first_iterates_of_fibonacci() {
        let sys = system("fibonacci");
        let seed = ColoredPointSet::from_vectors(
            sys.field(),
            1,
            sys.color_names().to_vec(),
            &[vec![sys.zero_vector()], vec![]],
            0.0,
        )
        .unwrap();
        let one = iterate_phi(&sys, &seed, 1).unwrap();
        assert_eq!(one.vectors(0), vec![sys.zero_vector()]);
        assert_eq!(one.vectors(1), vec![sys.vector(&["t"]).unwrap()]);
        let three = iterate_phi(&sys, &seed, 3).unwrap();
        // abaab: a at 0, φ², φ³; b at φ, φ³+φ
        let a: Vec<_> = ["0", "t+1", "2t+1"].iter().map(|e| sys.vector(&[e]).unwrap()).collect();
        let b: Vec<_> = ["t", "3t+1"].iter().map(|e| sys.vector(&[e]).unwrap()).collect();
        assert_eq!(three.vectors(0), a);
        assert_eq!(three.vectors(1), b);
    }
}
