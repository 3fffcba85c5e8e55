use meyerlab::catalog;
use meyerlab::report::{diagnostic_report, Profile, ReportParams};

#[test]
fn reports_are_reproducible() {
    let sys = catalog::system("period_doubling");
    let params = ReportParams::new(Profile::Quick).with_radius(120.0);
    let a = diagnostic_report(&sys, &params, None);
    let b = diagnostic_report(&sys, &params, None);
    assert!(a.is_complete(), "{:?}", a.stages);
    assert_eq!(a.exact_fields(), b.exact_fields());
    assert_eq!(a.config_hash, sys.config().hash_hex());
    assert_eq!(a.equivalence_table(), Some([true; 4]));
}

#[test]
fn artifacts_are_written_and_referenced() {
    let dir = tempfile::tempdir().unwrap();
    let sys = catalog::system("fibonacci");
    let r = diagnostic_report(&sys, &ReportParams::new(Profile::Quick).with_radius(100.0), Some(dir.path()));
    for path in &r.artifacts {
        assert!(std::path::Path::new(path).exists(), "{path}");
    }
    let meyer = r.verdicts.iter().find(|v| v.name == "meyer").unwrap();
    let csv = std::fs::read_to_string(meyer.artifact.as_ref().unwrap()).unwrap();
    assert!(csv.starts_with("radius,min_gap"));
    assert_eq!(meyer.parameters["radii"], serde_json::json!([25.0, 50.0, 100.0]));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
}

#[test]
fn stage_failures_give_a_partial_report() {
    let r = diagnostic_report(&catalog::system("nonprimitive"), &ReportParams::new(Profile::Quick), None);
    assert_eq!(r.status, "partial");
    assert!(r.validation.is_some() && r.primitivity.is_some());
    assert!(r.stages.iter().any(|s| s.stage == "control" && s.error.is_some()));
    let prim = r.verdicts.iter().find(|v| v.name == "primitive").unwrap();
    assert_eq!(prim.value, false);
}

#[test]
fn overrides_reach_the_parameters() {
    let p = ReportParams::new(Profile::Full).with_n_max(30).with_tol(1e-3).with_radius(400.0);
    assert_eq!(p.equivalence.search.n_max, 30);
    assert_eq!(p.equivalence.search.tol, 1e-3);
    assert_eq!(p.equivalence.windows(1), vec![100.0, 200.0, 400.0]);
    assert!(p.patch_radius(1) >= 401.0);
}
