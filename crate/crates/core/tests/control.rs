use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use meyerlab::catalog;
use meyerlab::control::{build_tile_map, control_offsets, tile_map_power, verify_control_translation, xi_observe, Telescoper};
use meyerlab::substitution::{default_generating, default_l_max, generate_patch, Primitivity};

/// Telescoping sums on random pairs reproduce `c(T) − c(S)` exactly, and the
/// translation property holds, across several catalog systems.
#[test]
fn random_pairs_telescope_exactly() {
    for name in ["fibonacci", "thue_morse", "period_doubling", "nonpisot13"] {
        let sys = catalog::system(name);
        let patch = generate_patch(&sys, 40.0).unwrap();
        let g = default_generating(&sys).unwrap();
        let Primitivity::Primitive { l } = sys.substitution_matrix().is_primitive(default_l_max(sys.colors())) else {
            panic!("{name} is primitive")
        };
        let tm = build_tile_map(&sys, tile_map_power(l, g.period)).unwrap();
        let atlas = control_offsets(&sys, &tm).unwrap();
        let xi = xi_observe(&sys, &patch).unwrap();
        assert!(verify_control_translation(&sys, &tm, &atlas, &patch, &xi).unwrap().holds, "{name}");
        let tel = Telescoper::new(&sys, &tm, &atlas, &patch).unwrap();
        let tiles: Vec<(usize, Vec<i64>)> =
            (0..patch.colors()).flat_map(|c| patch.points(c).iter().map(move |p| (c, p.key.clone()))).collect();
        let emb = patch.embedding();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let t = &tiles[rng.gen_range(0..tiles.len())];
            let s = &tiles[rng.gen_range(0..tiles.len())];
            let tt = tel.telescope(t, s).unwrap();
            let want = atlas.control_point(t.0, &emb.vector_of(&t.1)).sub(&atlas.control_point(s.0, &emb.vector_of(&s.1)));
            let mut acc = tt.u.last().unwrap().add(tt.w.last().unwrap());
            for n in (0..tt.u.len() - 1).rev() {
                acc = tm.q_power.apply(&acc).unwrap().add(&tt.u[n]).add(&tt.w[n]);
            }
            assert_eq!(acc, want, "{name}");
            assert!(tt.u.iter().chain(&tt.w).all(|v| tel.u_set().contains(v)));
        }
    }
}
