//! The diagnostic report: every pipeline stage on one system, with the
//! parameters, artifacts and timings behind each verdict.

pub mod json;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::control::{
    build_tile_map, control_offsets, tile_map_power, verify_control_translation, xi_observe, Telescoper,
};
use crate::diffraction::{equivalence_report_on, EquivalenceParams, EquivalenceReport, Stages};
use crate::geometry::{delone_constants, flc_check};
use crate::spectral::pisot_family_check;
use crate::substitution::{
    default_generating, default_l_max, generate_patch_from, is_legal, validate_system, ColoredPointSet, Primitivity,
    SubstitutionSystem,
};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Quick,
    Full,
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            other => Err(format!("unknown profile {other}; expected quick or full")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportParams {
    pub profile: Profile,
    pub check_depth: usize,
    pub legality_k_max: usize,
    pub legality_max_points: usize,
    /// Cluster radius of the FLC count.
    pub flc_radius: f64,
    pub equivalence: EquivalenceParams,
}

impl ReportParams {
    pub fn new(profile: Profile) -> Self {
        ReportParams {
            profile,
            check_depth: 3,
            legality_k_max: 5,
            legality_max_points: 200_000,
            flc_radius: 4.0,
            equivalence: match profile {
                Profile::Quick => EquivalenceParams::quick(),
                Profile::Full => EquivalenceParams::full(),
            },
        }
    }

    /// Largest cube half side; the gap radii become `{R/4, R/2, R}`.
    pub fn with_radius(mut self, r: f64) -> Self {
        let e = &mut self.equivalence;
        e.radius = r;
        e.radius_nd = r;
        e.gap_radii = vec![r / 4.0, r / 2.0, r];
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.equivalence.search.n_max = n_max;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.equivalence.search.tol = tol;
        self
    }

    /// Patch radius covering the Bragg cubes, the gap radii and the FLC window.
    pub fn patch_radius(&self, d: usize) -> f64 {
        let e = &self.equivalence;
        let cube = e.windows(d)[2] * (d as f64).sqrt() + 1.0;
        let gap = e.gap_radii(d).iter().copied().fold(0.0, f64::max);
        cube.max(gap).max(3.0 * self.flc_radius + 2.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub seconds: f64,
    pub error: Option<String>,
}

/// One verdict with the artifact that backs it and the parameters it used.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub value: Value,
    pub artifact: Option<String>,
    pub parameters: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticReport {
    pub schema: u32,
    /// `complete`, or `partial` when some stage failed.
    pub status: String,
    pub system: String,
    pub config_hash: String,
    pub parameters: ReportParams,
    pub validation: Option<Value>,
    pub primitivity: Option<Value>,
    pub generating: Option<Value>,
    pub legality: Option<Value>,
    pub patch: Option<Value>,
    pub delone: Option<Value>,
    pub flc: Option<Value>,
    pub spectral: Option<Value>,
    pub pisot: Option<Value>,
    pub xi: Option<Value>,
    pub control: Option<Value>,
    pub equivalence: Option<Value>,
    pub verdicts: Vec<VerdictEntry>,
    pub red_alerts: Vec<String>,
    pub artifacts: Vec<String>,
    pub stages: Vec<StageRecord>,
    pub runtime_seconds: f64,
}

impl DiagnosticReport {
    pub fn is_complete(&self) -> bool {
        self.status == "complete"
    }

    /// Schema-1 JSON with every float written to 17 significant digits.
    pub fn to_json(&self) -> String {
        json::to_string_pretty(&serde_json::to_value(self).expect("report serializes"))
    }

    /// The report without timings, for reproducibility comparisons.
    pub fn exact_fields(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        strip_timings(&mut v);
        v
    }

    /// The four equivalence verdicts, when that stage ran.
    pub fn equivalence_table(&self) -> Option<[bool; 4]> {
        let e = self.equivalence.as_ref()?;
        let get = |k: &str| e[k]["positive"].as_bool();
        Some([get("per_color_bragg")?, get("union_bragg")?, get("eigenvalues")?, get("meyer")?])
    }
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| k != "seconds" && k != "runtime_seconds");
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

struct Runner {
    stages: Vec<StageRecord>,
}

impl Runner {
    fn run<T, E: std::fmt::Display>(&mut self, name: &str, f: impl FnOnce() -> Result<T, E>) -> Option<T> {
        let t = Instant::now();
        let r = f();
        let seconds = t.elapsed().as_secs_f64();
        let (out, error) = match r {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        self.stages.push(StageRecord { stage: name.to_string(), seconds, error });
        out
    }

    fn skip(&mut self, name: &str, why: &str) {
        self.stages.push(StageRecord { stage: name.to_string(), seconds: 0.0, error: Some(format!("skipped: {why}")) });
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Writes `content` to `dir/name` and returns the path.
fn write_artifact(dir: Option<&Path>, name: &str, content: &str, list: &mut Vec<String>) -> Option<String> {
    let path: PathBuf = dir?.join(name);
    match std::fs::write(&path, content) {
        Ok(()) => {
            let s = path.display().to_string();
            list.push(s.clone());
            Some(s)
        }
        Err(_) => None,
    }
}

fn eigenvalue_csv(e: &EquivalenceReport) -> String {
    let d = e.eigenvalue_set.accepted.first().map_or(1, |a| a.alpha.len());
    let mut out: String = (0..d).map(|c| format!("alpha{c},")).collect();
    out.push_str("coords\n");
    for a in &e.eigenvalue_set.accepted {
        for x in &a.alpha {
            out.push_str(&format!("{x:.16e},"));
        }
        out.push_str(&format!("\"{}\"\n", a.coords.join(" ")));
    }
    out
}

/// Runs every stage on `sys`. Stage failures are recorded and later stages that
/// depend on them are skipped; the report is then `partial`. Artifacts go to `out`.
pub fn diagnostic_report(sys: &SubstitutionSystem, params: &ReportParams, out: Option<&Path>) -> DiagnosticReport {
    let start = Instant::now();
    let mut r = Runner { stages: Vec::new() };
    let mut artifacts = Vec::new();
    let mut verdicts = Vec::new();
    if let Some(dir) = out {
        if let Err(e) = std::fs::create_dir_all(dir) {
            r.stages.push(StageRecord { stage: "artifacts".into(), seconds: 0.0, error: Some(e.to_string()) });
        }
    }
    let d = sys.dimension();
    let names: Vec<String> = sys.color_names().to_vec();

    let validation = r.run("validation", || validate_system(sys, params.check_depth));
    if let Some(v) = &validation {
        verdicts.push(VerdictEntry {
            name: "valid".into(),
            value: json!(v.valid),
            artifact: None,
            parameters: json!({ "check_depth": params.check_depth }),
        });
    }

    let l_max = default_l_max(sys.colors());
    let primitivity = r.run("primitivity", || Ok::<_, String>(sys.substitution_matrix().is_primitive(l_max)));
    let witness = match &primitivity {
        Some(Primitivity::Primitive { l }) => Some(*l),
        _ => None,
    };
    if primitivity.is_some() {
        verdicts.push(VerdictEntry {
            name: "primitive".into(),
            value: json!(witness.is_some()),
            artifact: None,
            parameters: json!({ "l_max": l_max }),
        });
    }

    let generating = r.run("generating_cluster", || default_generating(sys));
    let legality = match &generating {
        Some(g) => r.run("legality", || {
            let cluster: Vec<_> = g.points.iter().map(|p| (p.color, p.point.clone())).collect();
            is_legal(sys, &cluster, params.legality_k_max, params.legality_max_points)
        }),
        None => {
            r.skip("legality", "no generating cluster");
            None
        }
    };
    if let Some(l) = &legality {
        verdicts.push(VerdictEntry {
            name: "generating_cluster_legal".into(),
            value: json!(l.is_legal()),
            artifact: None,
            parameters: json!({ "k_max": params.legality_k_max, "max_points": params.legality_max_points }),
        });
    }

    let radius = params.patch_radius(d);
    let patch: Option<ColoredPointSet> = match &generating {
        Some(g) => r.run("patch", || generate_patch_from(sys, g, radius)),
        None => {
            r.skip("patch", "no generating cluster");
            None
        }
    };
    let patch_artifact = patch.as_ref().and_then(|p| {
        let a = write_artifact(out, "patch.csv", &p.to_csv(), &mut artifacts);
        write_artifact(out, "patch.json", &p.sidecar_json(), &mut artifacts);
        a
    });

    let (delone, flc) = match &patch {
        Some(p) => (r.run("delone", || delone_constants(p)), r.run("flc", || flc_check(p, params.flc_radius))),
        None => {
            r.skip("delone", "no patch");
            r.skip("flc", "no patch");
            (None, None)
        }
    };
    if let Some(f) = &flc {
        verdicts.push(VerdictEntry {
            name: "flc".into(),
            value: to_value(&f.verdict),
            artifact: patch_artifact.clone(),
            parameters: json!({ "cluster_radius": params.flc_radius, "patch_radius": radius }),
        });
    }

    let spectral = r.run("spectral", || sys.spectral());
    let pisot = match &spectral {
        Some(s) => r.run("pisot_family", || pisot_family_check(s)),
        None => {
            r.skip("pisot_family", "no spectral data");
            None
        }
    };
    if let Some(p) = &pisot {
        verdicts.push(VerdictEntry {
            name: "pisot_family".into(),
            value: to_value(&p.verdict),
            artifact: None,
            parameters: json!({}),
        });
    }

    let xi_radius = params.equivalence.xi_radius;
    let control_patch = patch.as_ref().map(|p| p.restrict_ball(xi_radius.min(p.window())));
    let xi = match &control_patch {
        Some(p) => r.run("xi", || xi_observe(sys, p)),
        None => {
            r.skip("xi", "no patch");
            None
        }
    };
    let control = match (&control_patch, &xi, witness, &generating) {
        (Some(p), Some(xi), Some(l), Some(g)) => r.run("control", || {
            let power = tile_map_power(l, g.period);
            let tm = build_tile_map(sys, power)?;
            let atlas = control_offsets(sys, &tm)?;
            let translation = verify_control_translation(sys, &tm, &atlas, p, xi)?;
            let tel = Telescoper::new(sys, &tm, &atlas, p)?;
            let (u_q, u_qk) = tel.u_in_group(sys.q(), xi)?;
            Ok::<_, crate::control::ControlError>(json!({
                "tile_map_power": power,
                "atlas": to_value(&atlas.summary(&names)),
                "translation": to_value(&translation),
                "telescope": to_value(&tel.summary()),
                "q_u_in_group": u_q,
                "qk_u_in_group": u_qk,
            }))
        }),
        _ => {
            r.skip("control", "needs a patch, the translation group and a primitivity witness");
            None
        }
    };
    if let Some(c) = &control {
        verdicts.push(VerdictEntry {
            name: "control_translation".into(),
            value: c["translation"]["holds"].clone(),
            artifact: None,
            parameters: json!({ "patch_radius": xi_radius }),
        });
    }

    let mut red_alerts = Vec::new();
    let equivalence = match &patch {
        Some(p) => r.run("equivalence", || equivalence_report_on(sys, p, &params.equivalence, Stages::default())),
        None => {
            r.skip("equivalence", "no patch");
            None
        }
    };
    if let Some(e) = &equivalence {
        let ep = &params.equivalence;
        let gap = write_artifact(out, "gap_curve.csv", &e.gap_curve.to_csv(), &mut artifacts);
        let union = write_artifact(out, "bragg_union.csv", &e.union_peaks.to_csv(), &mut artifacts);
        let colors: Vec<Option<String>> = e
            .color_peaks
            .iter()
            .map(|(n, b)| write_artifact(out, &format!("bragg_{n}.csv"), &b.to_csv(), &mut artifacts))
            .collect();
        let eig = write_artifact(out, "eigenvalues.csv", &eigenvalue_csv(e), &mut artifacts);
        let bragg_params = to_value(&ep.bragg(d));
        let color_artifacts: Vec<String> = colors.into_iter().flatten().collect();
        verdicts.push(VerdictEntry {
            name: "per_color_bragg_dense".into(),
            value: json!(e.per_color_bragg.positive),
            artifact: (!color_artifacts.is_empty()).then(|| color_artifacts.join(";")),
            parameters: json!({ "bragg": bragg_params, "dense_gap": ep.dense_gap }),
        });
        verdicts.push(VerdictEntry {
            name: "union_bragg_dense".into(),
            value: json!(e.union_bragg.positive),
            artifact: union,
            parameters: json!({ "bragg": bragg_params, "dense_gap": ep.dense_gap }),
        });
        verdicts.push(VerdictEntry {
            name: "eigenvalues_dense".into(),
            value: json!(e.eigenvalues.positive),
            artifact: eig,
            parameters: json!({ "search": to_value(&ep.search), "dense_gap": ep.dense_gap }),
        });
        verdicts.push(VerdictEntry {
            name: "meyer".into(),
            value: to_value(&e.gap_curve.verdict),
            artifact: gap,
            parameters: json!({ "radii": ep.gap_radii(d) }),
        });
        red_alerts.extend(e.red_alerts.iter().cloned());
    }

    let status = if r.stages.iter().any(|s| s.error.is_some()) { "partial" } else { "complete" };
    let mut report = DiagnosticReport {
        schema: SCHEMA,
        status: status.into(),
        system: sys.name().to_string(),
        config_hash: sys.config().hash_hex(),
        parameters: params.clone(),
        validation: validation.as_ref().map(to_value),
        primitivity: primitivity.as_ref().map(to_value),
        generating: generating.as_ref().map(|g| to_value(&g.summary())),
        legality: legality.as_ref().map(to_value),
        patch: patch.as_ref().map(|p| json!({ "radius": radius, "points": p.len() })),
        delone: delone.as_ref().map(to_value),
        flc: flc.as_ref().map(to_value),
        spectral: spectral.as_ref().map(to_value),
        pisot: pisot.as_ref().map(to_value),
        xi: xi.as_ref().map(|x| to_value(&x.summary())),
        control,
        equivalence: equivalence.as_ref().map(to_value),
        verdicts,
        red_alerts,
        artifacts,
        stages: r.stages,
        runtime_seconds: 0.0,
    };
    report.runtime_seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = out {
        let path = dir.join("report.json");
        report.artifacts.push(path.display().to_string());
        let _ = std::fs::write(path, report.to_json());
    }
    report
}
