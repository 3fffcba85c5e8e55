//! The full diagnostic report for one system, as schema-1 JSON.
//!
//! `cargo run --release --example diagnostic_report -- [name] [out_dir]`

use std::path::Path;

use meyerlab::catalog;
use meyerlab::report::{diagnostic_report, Profile, ReportParams};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("fibonacci", String::as_str);
    let sys = catalog::system(name);
    let report = diagnostic_report(&sys, &ReportParams::new(Profile::Quick), args.get(1).map(Path::new));
    println!("{} ({}): {}", report.system, &report.config_hash[..12], report.status);
    for v in &report.verdicts {
        println!("  {:26} {}", v.name, v.value);
    }
    for s in &report.stages {
        println!("  stage {:20} {:8.3}s {}", s.stage, s.seconds, s.error.as_deref().unwrap_or(""));
    }
    println!("{} red alerts; report is {} bytes of JSON", report.red_alerts.len(), report.to_json().len());
}
