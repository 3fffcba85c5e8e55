//! Minimal gap of `Λ − Λ` at growing radii: constant for a Pisot inflation,
//! decaying for the (1+√13)/2 inflation.

use meyerlab::catalog;
use meyerlab::geometry::{delone_constants, flc_check, meyer_gap_curve};
use meyerlab::substitution::generate_patch;

fn main() {
    for (name, radii) in [("fibonacci", vec![50.0, 100.0, 200.0]), ("nonpisot13", vec![50.0, 500.0, 2000.0])] {
        let sys = catalog::system(name);
        let patch = generate_patch(&sys, *radii.last().unwrap()).expect("patch");
        let delone = delone_constants(&patch).expect("delone");
        let flc = flc_check(&patch.restrict_ball(60.0), 4.0).expect("flc");
        let curve = meyer_gap_curve(&patch, &radii).expect("gap curve");
        println!("{name}: {} points, packing {:.4}, covering {:.4}, FLC {:?}", patch.len(), delone.packing_radius, delone.covering_radius, flc.verdict);
        for (i, r) in curve.radii.iter().enumerate() {
            println!("  R = {r:6}: min gap {:.12}  exact {:?}", curve.min_gap[i], curve.exact[i]);
        }
        println!("  verdict {:?}", curve.verdict);
    }
}
