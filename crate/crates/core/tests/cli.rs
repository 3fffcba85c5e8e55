use std::process::{Command, Output};

use serde_json::Value;

fn meyerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meyerlab")).args(args).env("MEYERLAB_THREADS", "1").output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn catalog_list_and_show() {
    let o = meyerlab(&["catalog", "list"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split('\t').next().unwrap().to_string()).collect();
    assert!(names.len() >= 6);
    for n in ["fibonacci", "thue_morse", "period_doubling", "nonpisot13", "chair2d", "nonprimitive"] {
        assert!(names.iter().any(|m| m == n), "{n} missing");
    }
    let o = meyerlab(&["catalog", "show", "fibonacci"]);
    assert!(o.status.success());
    let cfg: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cfg["theta"]["minpoly"], serde_json::json!(["-1", "-1", "1"]));
}

#[test]
fn catalog_show_unknown_exits_one() {
    let o = meyerlab(&["catalog", "show", "nonexistent"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nonexistent"));
}

/// Counting oracle: left endpoints of the two-sided word `σ^∞(b).σ^∞(a)` for
/// `a → ab, b → a` with lengths `φ` and `1`, per color in `[-r, r]`.
fn fibonacci_counts(r: f64) -> (usize, usize) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let word = |seed: char| {
        let mut w = vec![seed];
        while w.len() < 4 * r as usize + 8 {
            for _ in 0..2 {
                w = w.iter().flat_map(|&c| if c == 'a' { vec!['a', 'b'] } else { vec!['a'] }).collect();
            }
        }
        w
    };
    let len = |c: char| if c == 'a' { phi } else { 1.0 };
    let mut counts = (0, 0);
    let mut bump = |c: char| if c == 'a' { counts.0 += 1 } else { counts.1 += 1 };
    let mut x = 0.0;
    for c in word('a') {
        if x > r + 1e-9 {
            break;
        }
        bump(c);
        x += len(c);
    }
    let mut x = 0.0;
    for c in word('b').into_iter().rev() {
        x -= len(c);
        if x < -r - 1e-9 {
            break;
        }
        bump(c);
    }
    counts
}

#[test]
fn generate_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = meyerlab(&["generate", "fibonacci", "--radius", "100", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("fibonacci_R100.csv")).unwrap();
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fibonacci_R100.json")).unwrap()).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    let a = rows.iter().filter(|r| r.starts_with("a,")).count();
    let b = rows.iter().filter(|r| r.starts_with("b,")).count();
    assert_eq!((a, b), fibonacci_counts(100.0));
    let colors = side["colors"].as_array().unwrap();
    assert_eq!(colors[0]["points"].as_array().unwrap().len(), a);
    assert_eq!(colors[1]["points"].as_array().unwrap().len(), b);
}

#[test]
fn generate_radius_zero_is_the_origin() {
    let o = meyerlab(&["generate", "fibonacci", "--radius", "0", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("a,0"));
}

#[test]
fn malformed_minpoly_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let src = meyerlab::catalog::source("fibonacci").unwrap().replace(r#"["-1", "-1", "1"]"#, r#"["-1", "-1", "2"]"#);
    std::fs::write(&path, src).unwrap();
    let o = meyerlab(&["generate", path.to_str().unwrap(), "--radius", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("minpoly not monic"));
    assert!(stderr(&o).contains("theta.minpoly"));
}

#[test]
fn missing_config_is_a_hard_error() {
    let o = meyerlab(&["spectrum", "/nonexistent/system.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_emits_a_schema_one_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = meyerlab(&["check", "fibonacci", "--profile", "quick", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["schema"], 1);
    assert_eq!(r["status"], "complete");
    assert_eq!(r["parameters"]["profile"], "quick");
    assert_eq!(r["parameters"]["equivalence"]["search"]["n_max"], 20);
    for v in r["verdicts"].as_array().unwrap() {
        assert!(v.get("parameters").is_some() && v.get("artifact").is_some());
    }
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("gap_curve.csv").exists());
}

#[test]
fn check_on_a_nonprimitive_system_is_partial() {
    let o = meyerlab(&["check", "nonprimitive", "--format", "json"]);
    assert!(o.status.success());
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["status"], "partial");
    assert_eq!(r["primitivity"]["verdict"], "not_primitive");
    assert_eq!(r["primitivity"]["l_max"], 4);
}

#[test]
fn spectrum_meyer_and_diffract_formats() {
    let o = meyerlab(&["spectrum", "nonpisot13", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("re,im,modulus"));
    let o = meyerlab(&["spectrum", "fibonacci"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pisot"]["verdict"], "pisot_family");

    let o = meyerlab(&["meyer", "fibonacci", "--radius", "100", "--format", "csv"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 4);
    let gaps: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(gaps.iter().all(|g| g == &gaps[0]));

    let o = meyerlab(&["diffract", "integer_doubling", "--radius", "100", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let union: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("union,"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(union.len(), 7);
    assert!(union.iter().all(|k| (k - k.round()).abs() < 1e-6));
}

#[test]
fn bad_thread_count_is_ignored() {
    let o = Command::new(env!("CARGO_BIN_EXE_meyerlab"))
        .args(["catalog", "list"])
        .env("MEYERLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("MEYERLAB_THREADS"));
}
