//! Validation, primitivity and legality of every catalog system.

use meyerlab::catalog;
use meyerlab::substitution::{default_generating, default_l_max, is_legal, validate_system};

fn main() {
    for name in catalog::names() {
        let sys = catalog::system(name);
        let m = sys.substitution_matrix();
        let prim = m.is_primitive(default_l_max(sys.colors()));
        let valid = validate_system(&sys, 3).map(|v| v.valid);
        print!("{name:18} S = {:?}  {prim:?}  valid: {valid:?}", m.s);
        match default_generating(&sys) {
            Ok(g) => {
                let cluster: Vec<_> = g.points.iter().map(|p| (p.color, p.point.clone())).collect();
                let legal = is_legal(&sys, &cluster, 5, 200_000).map(|l| l.is_legal());
                println!("  generating period {} legal: {legal:?}", g.period);
            }
            Err(e) => println!("  no generating cluster: {e}"),
        }
    }
}
