use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use meyerlab::arithmetic::poly::Poly;
use meyerlab::arithmetic::AlgebraicScalar;
use meyerlab::catalog;
use meyerlab::diffraction::intensity;
use meyerlab::geometry::meyer_gap_curve;
use meyerlab::report::json::format_f64;
use meyerlab::substitution::{default_generating, generate_patch};

fn phi_scalar(a: i64, b: i64, den: i64) -> AlgebraicScalar {
    let f = catalog::system("fibonacci").field().clone();
    let r = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(den));
    AlgebraicScalar::from_coeffs(&f, vec![r(a), r(b)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_arithmetic_is_exact(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, e in 1i64..9) {
        let x = phi_scalar(a, b, e);
        let y = phi_scalar(c, d, 1);
        let z = phi_scalar(b, c, 3);
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        if !x.is_zero() {
            let inv = x.inv().unwrap();
            prop_assert_eq!(&x * &inv, AlgebraicScalar::one(x.field()));
        }
        let f = x.to_f64_accurate();
        if f.abs() > 1e-9 {
            prop_assert_eq!(x.sign() as f64, f.signum());
        }
    }

    #[test]
    fn polynomial_division_identity(p in prop::collection::vec(-20i64..20, 1..8), q in prop::collection::vec(-5i64..5, 1..4)) {
        let p = Poly::from_ints(p);
        let mut q = Poly::from_ints(q);
        if q.is_zero() {
            q = Poly::one();
        }
        let (quo, rem) = p.div_rem(&q);
        prop_assert_eq!(quo.mul(&q).add(&rem), p);
        prop_assert!(rem.is_zero() || rem.degree() < q.degree());
    }

    #[test]
    fn float_writer_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = format_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
        prop_assert_eq!(digits, 17);
    }

    #[test]
    fn intensity_symmetries(pts in prop::collection::vec(-300i64..300, 1..60), k in -3.0f64..3.0) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|x| vec![x as f64]).collect();
        let w = [100.0, 200.0, 400.0];
        let p = intensity(&pts, &w, &[vec![k], vec![-k], vec![k + 1.0], vec![0.0]]).unwrap();
        for i in 0..3 {
            prop_assert!((p.values[0][i] - p.values[1][i]).abs() <= 1e-9 * (1.0 + p.values[0][i]));
            prop_assert!((p.values[0][i] - p.values[2][i]).abs() <= 1e-6 * (1.0 + p.values[0][i]));
            let n = p.counts[i] as f64;
            prop_assert!((p.values[3][i] - n * n / (2.0 * w[i])).abs() <= 1e-9 * (1.0 + n * n));
            prop_assert!(p.values[0][i] <= p.values[3][i] + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// `Λ_i ∩ B_r = ⋃_j (QΛ_j + D_ij) ∩ B_r`, with the union disjoint.
    #[test]
    fn patches_are_self_similar(which in 0usize..5, radius in 20.0f64..80.0) {
        let name = ["fibonacci", "thue_morse", "period_doubling", "nonpisot13", "chair2d"][which];
        let sys = catalog::system(name);
        let radius = if sys.dimension() > 1 { radius / 4.0 } else { radius };
        let period = default_generating(&sys).unwrap().period;
        let patch = generate_patch(&sys, radius).unwrap();
        let emb = patch.embedding();
        let sigma = sys.q_f64().svd(false, false).singular_values.min();
        let norm = |p: &[f64]| p.iter().map(|x| x * x).sum::<f64>().sqrt();
        // One hand-rolled step of the substitution, `period` times; `complete`
        // tracks the radius inside which the image is known in full.
        let mut level: Vec<Vec<Vec<i64>>> = (0..sys.colors()).map(|c| patch.points(c).iter().map(|p| p.key.clone()).collect()).collect();
        let mut complete = radius;
        for _ in 0..period {
            let mut next = vec![Vec::new(); sys.colors()];
            for (i, out) in next.iter_mut().enumerate() {
                let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
                for (j, keys) in level.iter().enumerate() {
                    for k in keys {
                        let qy = sys.q().apply(&emb.vector_of(k)).unwrap();
                        for a in sys.digit_set(i, j) {
                            *seen.entry(emb.key_of(&qy.add(a)).unwrap()).or_default() += 1;
                        }
                    }
                }
                prop_assert!(seen.values().all(|&m| m == 1), "{}: overlapping images", name);
                out.extend(seen.into_keys());
            }
            level = next;
            complete = sigma * complete - sys.max_digit_norm();
        }
        let r = (radius / 2.0).min(complete - 1.0);
        prop_assume!(r > 1.0);
        for i in 0..sys.colors() {
            let mut images: Vec<&Vec<i64>> = level[i].iter().filter(|k| norm(&emb.position(k)) <= r).collect();
            let mut inside: Vec<&Vec<i64>> = patch.points(i).iter().filter(|p| norm(&p.pos) <= r).map(|p| &p.key).collect();
            images.sort();
            inside.sort();
            prop_assert_eq!(inside, images, "{}: color {}", name, i);
        }
    }

    /// The minimal gap of `Λ − Λ` cannot grow with the radius.
    #[test]
    fn gap_curve_is_nonincreasing(which in 0usize..4, r0 in 10.0f64..40.0) {
        let name = ["fibonacci", "thue_morse", "period_doubling", "nonpisot13"][which];
        let sys = catalog::system(name);
        let radii = [r0, 2.0 * r0, 4.0 * r0];
        let patch = generate_patch(&sys, radii[2]).unwrap();
        let c = meyer_gap_curve(&patch, &radii).unwrap();
        prop_assert!(c.min_gap.windows(2).all(|w| w[1] <= w[0]), "{:?}", c.min_gap);
        prop_assert!(c.min_gap.iter().all(|&g| g > 0.0));
    }
}
