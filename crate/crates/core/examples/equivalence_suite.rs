//! The four density verdicts side by side for several systems.
//!
//! `cargo run --release --example equivalence_suite -- [quick|full] [names,...]`

use meyerlab::catalog;
use meyerlab::diffraction::{equivalence_report, EquivalenceParams};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let params = match args.first().map(String::as_str) {
        Some("full") => EquivalenceParams::full(),
        _ => EquivalenceParams::quick(),
    };
    let names: Vec<String> = match args.get(1) {
        Some(list) => list.split(',').map(String::from).collect(),
        None => vec!["fibonacci".into(), "thue_morse".into(), "nonpisot13".into()],
    };
    println!("{:18} {:>10} {:>10} {:>12} {:>8}  alerts", "system", "per-color", "union", "eigenvalues", "Meyer");
    for name in names {
        let sys = catalog::system(&name);
        let e = equivalence_report(&sys, &params).expect("report");
        let [a, b, c, d] = e.verdicts();
        println!("{name:18} {a:>10} {b:>10} {c:>12} {d:>8}  {}", e.red_alerts.len());
        for alert in e.red_alerts.iter().take(3) {
            println!("    {alert}");
        }
    }
}
