//! Define a system in JSON: the silver-mean substitution a → aab, b → a with
//! inflation 1 + √2.

use meyerlab::geometry::meyer_gap_curve;
use meyerlab::spectral::pisot_family_check;
use meyerlab::substitution::{generate_patch, SubstitutionSystem};

const SILVER: &str = r#"{
  "name": "silver_mean",
  "description": "a -> aab, b -> a",
  "dimension": 1,
  "colors": 2,
  "theta": {"minpoly": ["-1", "-2", "1"], "root_interval": ["2", "3"]},
  "Q": [["t"]],
  "digits": [
    [[["0"], ["t"]], [["0"]]],
    [[["2*t"]], []]
  ]
}"#;

fn main() {
    let sys = SubstitutionSystem::from_json(SILVER).expect("config");
    println!("{}: S = {:?}", sys.name(), sys.substitution_matrix().s);
    let v = pisot_family_check(&sys.spectral().expect("spectral")).expect("verdict");
    println!("Pisot family: {:?}", v.verdict);
    let patch = generate_patch(&sys, 200.0).expect("patch");
    let curve = meyer_gap_curve(&patch, &[50.0, 100.0, 200.0]).expect("gap curve");
    println!("min gaps {:?}: {:?}", curve.min_gap, curve.verdict);

    let broken = SILVER.replace(r#"["-1", "-2", "1"]"#, r#"["-1", "-2", "3"]"#);
    match SubstitutionSystem::from_json(&broken) {
        Err(e) => println!("non-monic minimal polynomial rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
