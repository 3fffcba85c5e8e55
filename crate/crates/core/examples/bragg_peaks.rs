//! Finite-window diffraction of the Fibonacci point set and its Bragg peaks.

use meyerlab::catalog;
use meyerlab::diffraction::{detect_bragg, intensity, BraggParams};
use meyerlab::substitution::generate_patch;

fn main() {
    let sys = catalog::system("fibonacci");
    let patch = generate_patch(&sys, 801.0).expect("patch");
    let points: Vec<Vec<f64>> = patch.union().into_iter().map(|p| p.pos).collect();

    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let ks = vec![vec![0.0], vec![1.0 / (phi + 2.0)], vec![0.5]];
    let profile = intensity(&points, &[200.0, 400.0, 800.0], &ks).expect("intensity");
    for (i, k) in ks.iter().enumerate() {
        let scores: Vec<String> = (0..3).map(|w| format!("{:.5}", profile.score(i, w))).collect();
        println!("I_n(k)/Vol at k = {:.6}: {}", k[0], scores.join("  "));
    }

    let set = detect_bragg(&points, &BraggParams::new(vec![200.0, 400.0, 800.0], 2.0)).expect("bragg");
    println!("density {:.6}, {} peaks in [-2, 2], largest gap {:.4}", set.density, set.peaks.len(), set.max_gap);
    for p in set.peaks.iter().filter(|p| p.intensity() > 0.01) {
        println!("  k = {:+.8}  intensity {:.5}", p.k[0], p.intensity());
    }
}
