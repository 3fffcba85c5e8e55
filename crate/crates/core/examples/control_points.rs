//! Control points, the translation group Ξ and the telescoping decomposition
//! of `c(T) − c(S)` on a Fibonacci patch.

use meyerlab::catalog;
use meyerlab::control::{build_tile_map, control_offsets, telescope_decomposition, verify_control_translation, xi_observe};
use meyerlab::substitution::generate_patch;

fn main() {
    let sys = catalog::system("fibonacci");
    let patch = generate_patch(&sys, 50.0).expect("patch");
    let tm = build_tile_map(&sys, 2).expect("tile map");
    let atlas = control_offsets(&sys, &tm).expect("offsets");
    let names = patch.color_names().to_vec();
    println!("control offsets: {:?}", atlas.summary(&names).offsets);

    let xi = xi_observe(&sys, &patch).expect("Ξ");
    let s = xi.summary();
    println!("Ξ generators {:?}, M = {:?}, char poly of M {:?}", s.generators, s.m, s.charpoly_m);

    let check = verify_control_translation(&sys, &tm, &atlas, &patch, &xi).expect("translation check");
    println!("Q^k (c(T) - c(S)) in Ξ for all {} tiles: {}", check.tiles, check.holds);

    let emb = patch.embedding();
    let a = (1, emb.vector_of(&patch.points(1)[7].key));
    let b = (0, emb.vector_of(&patch.points(0)[3].key));
    let t = telescope_decomposition(&sys, &tm, &atlas, &a, &b, &patch).expect("telescope");
    println!("T = b at {}, S = a at {}", a.1, b.1);
    println!("c(T) - c(S) = {} over {} levels, exact: {}", t.difference, t.depth, t.exact);
}
