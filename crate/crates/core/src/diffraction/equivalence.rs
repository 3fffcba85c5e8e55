//! Four density verdicts side by side: per-color Bragg peaks, union Bragg
//! peaks, dynamical eigenvalues and the Meyer gap curve.

use std::time::Instant;

use serde::Serialize;

use crate::control::xi_observe;
use crate::geometry::{meyer_gap_curve, GapCurve, MeyerVerdict};
use crate::substitution::{generate_patch, ColoredPointSet, SubstitutionSystem};

use super::bragg::{detect_bragg, BraggParams, BraggSet};
use super::eigen::{search_with, DualModule, EigenvalueSet, SearchParams};
use super::DiffractionError;

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceParams {
    /// Patch radius and largest cube half side in dimension one.
    pub radius: f64,
    /// Largest cube half side in higher dimensions.
    pub radius_nd: f64,
    /// Radii of the Meyer gap curve in dimension one.
    pub gap_radii: Vec<f64>,
    /// Bragg peaks are searched in `[-bragg_box, bragg_box]^d`.
    pub bragg_box: f64,
    pub bragg_box_nd: f64,
    /// Grid cap for the Bragg scan in higher dimensions.
    pub max_grid_nd: usize,
    /// A set is relatively dense when its largest empty ball in the box has
    /// radius at most this.
    pub dense_gap: f64,
    /// Patch radius used to observe `Ξ`.
    pub xi_radius: f64,
    pub search: SearchParams,
    /// Bragg peaks are matched to the dual grid within `snap_rel / n` for the
    /// largest cube half side `n`, and never looser than needed for 1e-6.
    pub snap_rel: f64,
    pub snap_q_max: i64,
    pub snap_height: i64,
}

impl EquivalenceParams {
    pub fn quick() -> Self {
        EquivalenceParams {
            radius: 200.0,
            radius_nd: 16.0,
            gap_radii: vec![50.0, 100.0, 200.0],
            bragg_box: 3.0,
            bragg_box_nd: 1.5,
            max_grid_nd: 20_000,
            dense_gap: 1.0,
            xi_radius: 30.0,
            search: SearchParams { n_max: 20, tol: 1e-2, ..SearchParams::default() },
            snap_rel: 0.1,
            snap_q_max: 64,
            snap_height: 100,
        }
    }

    pub fn full() -> Self {
        EquivalenceParams {
            radius: 2000.0,
            radius_nd: 24.0,
            gap_radii: vec![50.0, 500.0, 2000.0],
            search: SearchParams::default(),
            ..Self::quick()
        }
    }

    /// Cube half sides `{R/4, R/2, R}` for dimension `d`.
    pub fn windows(&self, d: usize) -> Vec<f64> {
        let r = if d == 1 { self.radius } else { self.radius_nd };
        vec![r / 4.0, r / 2.0, r]
    }

    pub fn bragg(&self, d: usize) -> BraggParams {
        let mut p = BraggParams::new(self.windows(d), if d == 1 { self.bragg_box } else { self.bragg_box_nd });
        if d > 1 {
            p.max_grid = self.max_grid_nd;
        }
        p
    }

    pub fn snap_tol(&self, d: usize) -> f64 {
        (self.snap_rel / self.windows(d)[2]).max(1e-6)
    }

    pub fn gap_radii(&self, d: usize) -> Vec<f64> {
        if d == 1 {
            self.gap_radii.clone()
        } else {
            self.windows(d)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub positive: bool,
    /// Largest empty-ball radius, for the density verdicts.
    pub max_gap: Option<f64>,
    pub evidence: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeakCheck {
    /// `union` or a color name.
    pub set: String,
    pub k: Vec<f64>,
    /// Dual coordinates of the matching grid point.
    pub snapped: Option<Vec<String>>,
    pub passes: bool,
    pub score: Option<f64>,
}

/// Wall-clock seconds per stage.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Stages {
    pub seconds: Vec<(String, f64)>,
}

impl Stages {
    fn run<T>(&mut self, name: &'static str, f: impl FnOnce() -> Result<T, DiffractionError>) -> Result<T, DiffractionError> {
        let t = Instant::now();
        let r = f().map_err(|e| match e {
            s @ DiffractionError::Stage { .. } => s,
            other => DiffractionError::stage(name, other),
        });
        self.seconds.push((name.to_string(), t.elapsed().as_secs_f64()));
        r
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub system: String,
    pub params: EquivalenceParams,
    /// (i) every color has relatively dense Bragg peaks.
    pub per_color_bragg: Verdict,
    /// (ii) the union has relatively dense Bragg peaks.
    pub union_bragg: Verdict,
    /// (iii) the dynamical eigenvalues are relatively dense.
    pub eigenvalues: Verdict,
    /// (iv) the gap curve stabilizes.
    pub meyer: Verdict,
    pub color_peaks: Vec<(String, BraggSet)>,
    pub union_peaks: BraggSet,
    pub eigenvalue_set: EigenvalueSet,
    pub gap_curve: GapCurve,
    pub peak_checks: Vec<PeakCheck>,
    pub red_alerts: Vec<String>,
    pub stages: Stages,
}

impl EquivalenceReport {
    pub fn verdicts(&self) -> [bool; 4] {
        [self.per_color_bragg.positive, self.union_bragg.positive, self.eigenvalues.positive, self.meyer.positive]
    }

    pub fn consistent(&self) -> bool {
        self.red_alerts.is_empty()
    }
}

fn positions(points: &[crate::substitution::Point]) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.pos.clone()).collect()
}

fn density_verdict(gap: f64, dense: f64, what: &str) -> Verdict {
    Verdict {
        positive: gap <= dense,
        max_gap: Some(gap),
        evidence: format!("{what}: largest empty ball {gap:.6} against threshold {dense}"),
    }
}

/// Runs all four stages on a freshly generated patch.
pub fn equivalence_report(sys: &SubstitutionSystem, params: &EquivalenceParams) -> Result<EquivalenceReport, DiffractionError> {
    let d = sys.dimension();
    let windows = params.windows(d);
    let radius = windows[2] * (d as f64).sqrt() + 1.0;
    let radius = radius.max(params.gap_radii(d).iter().copied().fold(0.0, f64::max));
    let mut stages = Stages::default();
    let patch = stages.run("patch", || Ok(generate_patch(sys, radius)?))?;
    equivalence_report_on(sys, &patch, params, stages)
}

/// The same on a given patch, whose window must cover the cubes and gap radii.
pub fn equivalence_report_on(
    sys: &SubstitutionSystem,
    patch: &ColoredPointSet,
    params: &EquivalenceParams,
    mut stages: Stages,
) -> Result<EquivalenceReport, DiffractionError> {
    let d = sys.dimension();
    let bp = params.bragg(d);
    let names = patch.color_names().to_vec();

    let color_peaks: Vec<(String, BraggSet)> = stages.run("bragg_per_color", || {
        (0..patch.colors())
            .map(|c| Ok((names[c].clone(), detect_bragg(&positions(patch.points(c)), &bp)?)))
            .collect()
    })?;
    let union_peaks = stages.run("bragg_union", || detect_bragg(&positions(&patch.union()), &bp))?;

    let xi_patch = patch.restrict_ball(params.xi_radius.min(patch.window()));
    let xi = stages.run("xi", || Ok(xi_observe(sys, &xi_patch)?))?;
    let dual = stages.run("dual_module", || DualModule::new(&xi, sys.q(), params.search.n_max))?;
    let eigen = stages.run("eigenvalue_search", || search_with(&dual, &params.search))?;
    let gap_curve = stages.run("meyer_gap_curve", || Ok(meyer_gap_curve(patch, &params.gap_radii(d))?))?;

    let worst = color_peaks.iter().map(|(_, b)| b.max_gap).fold(0.0, f64::max);
    let per_color_bragg = density_verdict(worst, params.dense_gap, "worst color");
    let union_bragg = density_verdict(union_peaks.max_gap, params.dense_gap, "union");
    let eigenvalues = density_verdict(eigen.max_gap, params.dense_gap, "accepted eigenvalues");
    let meyer = Verdict {
        positive: gap_curve.verdict == MeyerVerdict::Stabilized,
        max_gap: None,
        evidence: format!("gap curve {:?} at radii {:?}: {:?}", gap_curve.min_gap, gap_curve.radii, gap_curve.verdict),
    };

    let snap_tol = params.snap_tol(d);
    let peak_checks: Vec<PeakCheck> = stages.run("peak_consistency", || {
        let sets = color_peaks.iter().map(|(n, b)| (n.clone(), b)).chain(std::iter::once(("union".to_string(), &union_peaks)));
        Ok(sets
            .flat_map(|(name, set)| {
                let dual = &dual;
                set.peaks.iter().map(move |p| {
                    let snapped = dual.snap(&p.k, params.snap_q_max, params.snap_height, snap_tol);
                    let test = snapped.as_ref().map(|c| dual.test(c, params.search.tol));
                    PeakCheck {
                        set: name.clone(),
                        k: p.k.clone(),
                        snapped: snapped.map(|c| c.coords()),
                        passes: test.as_ref().is_some_and(|t| t.pass),
                        score: test.map(|t| t.score()),
                    }
                })
            })
            .collect())
    })?;

    let mut red_alerts = Vec::new();
    if eigenvalues.positive != meyer.positive {
        red_alerts.push(format!(
            "eigenvalue density is {} but the Meyer verdict is {:?}",
            if eigenvalues.positive { "positive" } else { "negative" },
            gap_curve.verdict
        ));
    }
    if (per_color_bragg.positive || union_bragg.positive) && !eigenvalues.positive {
        red_alerts.push("Bragg peaks are relatively dense but the eigenvalues are not".into());
    }
    for c in peak_checks.iter().filter(|c| !c.passes) {
        red_alerts.push(match &c.snapped {
            None => format!("Bragg peak of {} at {:?} has no dual-grid match", c.set, c.k),
            Some(s) => format!("Bragg peak of {} at {:?} ({s:?}) fails the eigenvalue test", c.set, c.k),
        });
    }
    Ok(EquivalenceReport {
        system: sys.name().to_string(),
        params: params.clone(),
        per_color_bragg,
        union_bragg,
        eigenvalues,
        meyer,
        color_peaks,
        union_peaks,
        eigenvalue_set: eigen,
        gap_curve,
        peak_checks,
        red_alerts,
        stages,
    })
}
