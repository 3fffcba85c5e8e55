//! Dynamical eigenvalues through `‖⟨Qⁿx, α⟩‖ → 0` on the generators of Ξ.

use meyerlab::catalog;
use meyerlab::control::xi_observe;
use meyerlab::diffraction::{eigenvalue_search, eigenvalue_test, SearchParams};
use meyerlab::substitution::generate_patch;

fn main() {
    for name in ["fibonacci", "nonpisot13"] {
        let sys = catalog::system(name);
        let patch = generate_patch(&sys, 30.0).expect("patch");
        let xi = xi_observe(&sys, &patch).expect("Ξ");
        let one = eigenvalue_test(&sys.vector(&["1"]).unwrap(), &xi, sys.q(), 40, 1e-4).expect("test");
        println!("{name}: α = 1 passes: {}  (‖⟨Qⁿx, 1⟩‖ at n = 40: {:.3e})", one.pass, one.curve.last().unwrap().1);
        let set = eigenvalue_search(&xi, sys.q(), &SearchParams::default()).expect("search");
        let sample: Vec<String> = set.accepted.iter().take(8).map(|a| format!("{:.6}", a.alpha[0])).collect();
        println!(
            "  tested {} candidates, accepted {} (e.g. {}), largest gap in [-5, 5]: {:.4}",
            set.tested,
            set.accepted.len(),
            sample.join(", "),
            set.max_gap
        );
    }
}
