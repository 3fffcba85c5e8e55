use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use meyerlab::catalog;
use meyerlab::diffraction::{equivalence_report, EquivalenceReport};
use meyerlab::geometry::meyer_gap_curve;
use meyerlab::report::{diagnostic_report, json, Profile, ReportParams};
use meyerlab::spectral::pisot_family_check;
use meyerlab::substitution::{generate_patch, SubstitutionError, SubstitutionSystem};

#[derive(Parser)]
#[command(name = "meyerlab", version, about = "Substitution Delone multisets: patches, spectra, diffraction and Meyer checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the patch `Λ ∩ B_R(0)` as CSV plus an exact JSON sidecar.
    Generate(Run),
    /// Run the full diagnostic pipeline and print the report.
    Check(Run),
    /// Built-in example systems.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Eigenvalues of Q and the Pisot-family verdict.
    Spectrum(Run),
    /// Bragg peaks and dynamical eigenvalues with the equivalence table.
    Diffract(Run),
    /// Minimal gap of the difference set at `R/4, R/2, R`.
    Meyer(Run),
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Run {
    /// Config file, or the name of a catalog entry.
    system: String,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "quick")]
    profile: Profile,
    /// Directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

impl Run {
    fn params(&self) -> ReportParams {
        let mut p = ReportParams::new(self.profile);
        if let Some(r) = self.radius {
            p = p.with_radius(r);
        }
        if let Some(n) = self.nmax {
            p = p.with_n_max(n);
        }
        if let Some(t) = self.tol {
            p = p.with_tol(t);
        }
        p
    }
}

enum Failure {
    Config(String),
    Other(String),
}

impl From<SubstitutionError> for Failure {
    fn from(e: SubstitutionError) -> Self {
        match e {
            SubstitutionError::Config { .. } => Failure::Config(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn other(e: impl std::fmt::Display) -> Failure {
    Failure::Other(e.to_string())
}

fn load(arg: &str) -> Result<SubstitutionSystem, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let src = std::fs::read_to_string(path).map_err(|e| other(format!("{arg}: {e}")))?;
        return Ok(SubstitutionSystem::from_json(&src)?);
    }
    if catalog::source(arg).is_some() {
        return Ok(catalog::load(arg)?);
    }
    Err(other(format!("{arg}: no such config file or catalog entry")))
}

fn emit(text: &str, out: Option<&Path>, file: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(other)?;
            let path = dir.join(file);
            std::fs::write(&path, text).map_err(|e| other(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(run: &Run) -> Result<(), Failure> {
    let sys = load(&run.system)?;
    let r = run.radius.unwrap_or(100.0);
    let patch = generate_patch(&sys, r)?;
    match &run.out {
        Some(dir) => {
            let stem = format!("{}_R{r}", sys.name());
            emit(&patch.to_csv(), Some(dir), &format!("{stem}.csv"))?;
            emit(&patch.sidecar_json(), Some(dir), &format!("{stem}.json"))
        }
        None if run.format == Format::Csv => emit(&patch.to_csv(), None, ""),
        None => emit(&(patch.sidecar_json() + "\n"), None, ""),
    }
}

fn check(run: &Run) -> Result<(), Failure> {
    let sys = load(&run.system)?;
    let report = diagnostic_report(&sys, &run.params(), run.out.as_deref());
    for s in report.stages.iter().filter(|s| s.error.is_some()) {
        eprintln!("stage {}: {}", s.stage, s.error.as_deref().unwrap_or_default());
    }
    match run.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Csv => {
            let mut out = String::from("verdict,value,artifact\n");
            for v in &report.verdicts {
                out.push_str(&format!("{},{},{}\n", v.name, v.value, v.artifact.as_deref().unwrap_or("")));
            }
            print!("{out}");
        }
    }
    Ok(())
}

fn catalog_cmd(action: &CatalogAction) -> Result<(), Failure> {
    match action {
        CatalogAction::List => {
            for n in catalog::names() {
                let c = catalog::config(n).expect("listed");
                println!("{n}\t{}", c.description);
            }
            Ok(())
        }
        CatalogAction::Show { name } => match catalog::source(name) {
            Some(src) => {
                print!("{src}");
                Ok(())
            }
            None => Err(other(format!("unknown catalog entry {name}; try `meyerlab catalog list`"))),
        },
    }
}

fn spectrum(run: &Run) -> Result<(), Failure> {
    let sys = load(&run.system)?;
    let spec = sys.spectral()?;
    let pisot = pisot_family_check(&spec).map_err(other)?;
    let text = match run.format {
        Format::Json => json::to_string_pretty(&json!({ "system": sys.name(), "spectral": spec, "pisot": pisot })),
        Format::Csv => {
            let mut s = String::from("re,im,modulus,radius,multiplicity,jordan_blocks\n");
            for e in &spec.eigenvalues {
                let blocks: Vec<String> = e.jordan_blocks.iter().map(|b| b.to_string()).collect();
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    json::format_f64(e.re),
                    json::format_f64(e.im),
                    json::format_f64(e.z().norm()),
                    json::format_f64(e.radius),
                    e.multiplicity,
                    blocks.join(" ")
                ));
            }
            s
        }
    };
    emit(&text, run.out.as_deref(), &format!("{}_spectrum.{}", sys.name(), ext(run.format)))
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

fn diffract(run: &Run) -> Result<(), Failure> {
    let sys = load(&run.system)?;
    let params = run.params();
    let e: EquivalenceReport = equivalence_report(&sys, &params.equivalence).map_err(other)?;
    for a in &e.red_alerts {
        eprintln!("red alert: {a}");
    }
    let text = match run.format {
        Format::Json => json::to_string_pretty(&serde_json::to_value(&e).map_err(other)?),
        Format::Csv => {
            let mut s = String::from("set,");
            let d = sys.dimension();
            s.push_str(&(0..d).map(|c| format!("k{c}")).collect::<Vec<_>>().join(","));
            s.push_str(",intensity\n");
            let sets = e.color_peaks.iter().map(|(n, b)| (n.as_str(), b)).chain(std::iter::once(("union", &e.union_peaks)));
            for (name, b) in sets {
                for p in &b.peaks {
                    let k: Vec<String> = p.k.iter().map(|x| json::format_f64(*x)).collect();
                    s.push_str(&format!("{name},{},{}\n", k.join(","), json::format_f64(p.intensity())));
                }
            }
            s
        }
    };
    emit(&text, run.out.as_deref(), &format!("{}_diffraction.{}", sys.name(), ext(run.format)))
}

fn meyer(run: &Run) -> Result<(), Failure> {
    let sys = load(&run.system)?;
    let params = run.params();
    let radii = params.equivalence.gap_radii(sys.dimension());
    let r = radii.iter().copied().fold(0.0, f64::max);
    let patch = generate_patch(&sys, r)?;
    let curve = meyer_gap_curve(&patch, &radii).map_err(other)?;
    let text = match run.format {
        Format::Json => json::to_string_pretty(&json!({ "system": sys.name(), "gap_curve": curve })),
        Format::Csv => curve.to_csv(),
    };
    emit(&text, run.out.as_deref(), &format!("{}_gap_curve.{}", sys.name(), ext(run.format)))
}

fn threads() {
    if let Ok(v) = std::env::var("MEYERLAB_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring MEYERLAB_THREADS={v}: expected a positive integer"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    threads();
    let result = match &cli.command {
        Command::Generate(r) => generate(r),
        Command::Check(r) => check(r),
        Command::Catalog { action } => catalog_cmd(action),
        Command::Spectrum(r) => spectrum(r),
        Command::Diffract(r) => diffract(r),
        Command::Meyer(r) => meyer(r),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
