//! Eigenvalues of the expansion, the Pisot-family verdict and a separation bound.

use meyerlab::arithmetic::AlgebraicScalar;
use meyerlab::catalog;
use meyerlab::spectral::{pisot_family_check, separation_bound};

fn main() {
    for name in ["fibonacci", "nonpisot13", "chair2d"] {
        let sys = catalog::system(name);
        let spec = sys.spectral().expect("spectral data");
        println!("{name}: char poly {:?}", spec.charpoly.to_strings());
        for e in &spec.eigenvalues {
            println!("  λ = {:+.10} {:+.10}i  |λ| = {:.10}  blocks {:?}", e.re, e.im, e.z().norm(), e.jordan_blocks);
        }
        let v = pisot_family_check(&spec).expect("verdict");
        println!("  {:?}", v.verdict);
        for w in &v.witnesses {
            println!("  witness conjugate |λ'| in [{:.6}, {:.6}] of {:?}", w.modulus_lo, w.modulus_hi, w.minimal_polynomial);
        }
    }
    let sys = catalog::system("fibonacci");
    let phi = AlgebraicScalar::theta(sys.field());
    let cert = separation_bound(&phi, 1, 12, 1).expect("bound");
    println!("|S(φ)| ≥ {:.6e} for nonzero S with coefficients in [-1, 1] and degree ≤ 12", cert.lower_bound_f64);
}
