//! Generate `Λ ∩ B_R(0)` for a catalog system and write the CSV and exact sidecar.
//!
//! `cargo run --example generate_patch -- [name] [radius] [out_dir]`

use meyerlab::catalog;
use meyerlab::substitution::{default_generating, generate_patch_from};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("fibonacci", String::as_str);
    let radius: f64 = args.get(1).map_or(100.0, |s| s.parse().expect("radius"));
    let sys = catalog::system(name);
    let g = default_generating(&sys).expect("generating cluster");
    println!("{name}: generating cluster {}", g.describe());
    let patch = generate_patch_from(&sys, &g, radius).expect("patch");
    for (c, color) in patch.color_names().iter().enumerate() {
        println!("  {color}: {} points in B_{radius}(0)", patch.points(c).len());
    }
    if let Some(dir) = args.get(2) {
        std::fs::create_dir_all(dir).expect("out dir");
        let csv = format!("{dir}/{name}.csv");
        std::fs::write(&csv, patch.to_csv()).expect("write csv");
        std::fs::write(format!("{dir}/{name}.json"), patch.sidecar_json()).expect("write sidecar");
        println!("wrote {csv} and its sidecar");
    }
}
