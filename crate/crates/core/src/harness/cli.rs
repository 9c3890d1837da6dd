//! Command-line front end. Every subcommand reads a JSON config, writes
//! CSV/JSON artifacts to `--out` (when given) and prints a summary.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiments::{clt_experiment, depoisson_experiment, empirical_process_experiment, fixed_n_experiment, CltReport};
use super::radius::{stab_radius_experiment, StabRadiusConfig};
use super::report::{emit_report, ensure_dir, write_covariance_csv, write_json, write_plot_data};
use crate::error::{Error, Result};
use crate::fmt17;
use crate::functionals::{evaluate_many, FunctionalSpec};
use crate::geometry::Region;
use crate::graphs::GraphBuilder;
use crate::percolation::{cluster_analysis, sample_lattice, LatticeFunctional, LatticeWindow};
use crate::point_process::{attach_marks, sample_binomial, sample_poisson, PointConfiguration};
use crate::stabilization::{estimate_delta_infinity, estimate_sigma_continuum, estimate_sigma_lattice, estimate_tau, WindowSchedule};

#[derive(Debug, Parser)]
#[command(name = "stabgeom", version, about = "Stabilizing geometric functionals: simulation and CLT checks")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (1 runs serially).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a Poisson or binomial point configuration.
    Sample,
    /// Build a graph on sampled or loaded points.
    Graph,
    /// Evaluate functionals on sampled or loaded points.
    Functional,
    /// Sample site percolation and evaluate lattice measures.
    Percolation,
    /// Stabilization radii with adversarial probes.
    StabRadius,
    /// Estimate the limiting add-one cost.
    DeltaInf,
    /// Estimate the limiting covariance ingredients (and tau).
    Sigma,
    /// Poisson or lattice CLT experiment.
    Clt,
    /// Binomial-sample experiment against the de-Poissonized limit.
    Depoisson,
    /// Fixed-n experiment for homogeneous functionals.
    FixedN,
    /// Edge-length empirical process covariance.
    Empirical,
    /// Summarize a previously written report.
    Report {
        /// Report JSON (defaults to `--config`).
        input: Option<PathBuf>,
    },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    CriterionFailure = 1,
    InvalidConfig = 2,
    RuntimeError = 3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    Poisson,
    Binomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub process: Process,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub n: usize,
    pub region: Region,
    #[serde(default)]
    pub marks: bool,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

/// Points come from a CSV file or a sampling config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    #[serde(flatten)]
    pub source: PointSource,
    pub builder: GraphBuilder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalConfig {
    #[serde(flatten)]
    pub source: PointSource,
    pub functionals: Vec<FunctionalSpec>,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationConfig {
    pub b0: Region,
    pub t: f64,
    pub p: f64,
    pub measures: Vec<LatticeFunctional>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaInfConfig {
    pub functional: FunctionalSpec,
    pub dim: usize,
    #[serde(default = "one")]
    pub lambda: f64,
    pub schedule: WindowSchedule,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaConfig {
    #[serde(default)]
    pub functionals: Vec<FunctionalSpec>,
    #[serde(default)]
    pub lattice_functionals: Vec<LatticeFunctional>,
    pub dim: usize,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub p: f64,
    pub schedule: WindowSchedule,
    pub outer_n: usize,
    pub inner_m: usize,
    #[serde(default)]
    pub seed: u64,
    /// With `b0`, also report tau for these regions (one per functional).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<Region>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<Region>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConfig {
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
    pub s_values: Vec<f64>,
}

/// Error raised while loading the configuration (always exit code 2).
struct ConfigError(Error);

fn load<T: DeserializeOwned>(cli: &Cli) -> std::result::Result<T, ConfigError> {
    let path = cli.config.as_ref().ok_or_else(|| ConfigError(Error::InvalidInput("--config <json> is required".into())))?;
    let text = fs::read_to_string(path).map_err(|e| ConfigError(Error::io(path, e)))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(Error::Json(e)))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

fn out_dir(cli: &Cli) -> Result<Option<&Path>> {
    match &cli.out {
        Some(d) => {
            ensure_dir(d)?;
            Ok(Some(d.as_path()))
        }
        None => Ok(None),
    }
}

fn sample_points(s: &SampleConfig) -> Result<(PointConfiguration, Option<Vec<f64>>)> {
    let pts = match s.process {
        Process::Poisson => sample_poisson(s.lambda, &s.region, s.seed)?,
        Process::Binomial => sample_binomial(s.n, &s.region, s.seed)?,
    };
    if s.marks {
        let (p, m) = attach_marks(pts, s.seed).into_parts();
        Ok((p, Some(m)))
    } else {
        Ok((pts, None))
    }
}

fn source_points(src: &PointSource, seed: Option<u64>) -> Result<(PointConfiguration, Option<Vec<f64>>)> {
    match (&src.points, &src.sample) {
        (Some(path), None) => {
            let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
            PointConfiguration::read_csv(f)
        }
        (None, Some(s)) => {
            let mut s = s.clone();
            if let Some(seed) = seed {
                s.seed = seed;
            }
            sample_points(&s)
        }
        _ => Err(Error::input("give exactly one of `points` (CSV path) or `sample`")),
    }
}

/// Prints one line per criterion; returns the overall status.
fn print_criteria(r: &CltReport) -> Status {
    for c in &r.criteria {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for n in &r.notes {
        println!("note: {n}");
    }
    for s in &r.scales {
        let k = s.covariance.dim();
        let diag: Vec<String> = (0..k).map(|i| fmt17(s.covariance.cov[i][i])).collect();
        println!("scale {}: normalized variances [{}]", fmt17(s.scale), diag.join(", "));
    }
    if r.passed {
        Status::Pass
    } else {
        Status::CriterionFailure
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) {
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
}

fn run(cli: &Cli) -> std::result::Result<Status, ConfigError> {
    macro_rules! go {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(e) => return Ok(fail(e)),
            }
        };
    }
    let status = match &cli.command {
        Command::Sample => {
            let mut s: SampleConfig = load(cli)?;
            if let Some(seed) = cli.seed {
                s.seed = seed;
            }
            let (pts, marks) = go!(sample_points(&s));
            match go!(out_dir(cli)) {
                Some(d) => {
                    let path = d.join("points.csv");
                    let f = go!(fs::File::create(&path).map_err(|e| Error::io(&path, e)));
                    go!(pts.write_csv(f, marks.as_deref()));
                    println!("{} points -> {}", pts.len(), path.display());
                }
                None => go!(pts.write_csv(io::stdout().lock(), marks.as_deref())),
            }
            Status::Pass
        }
        Command::Graph => {
            let g: GraphConfig = load(cli)?;
            let (pts, marks) = go!(source_points(&g.source, cli.seed));
            let graph = go!(g.builder.build(&pts, marks.as_deref()));
            if let Some(d) = go!(out_dir(cli)) {
                let path = d.join("edges.csv");
                let f = go!(fs::File::create(&path).map_err(|e| Error::io(&path, e)));
                go!(graph.write_csv(f));
            }
            let comps = graph.components();
            let n_comp = comps.iter().copied().max().map_or(0, |m| m + 1);
            go!(print_json(&serde_json::json!({
                "builder": g.builder.name(),
                "vertices": graph.vertex_count(),
                "edges": graph.edges().len(),
                "total_length": fmt17(graph.total_length()),
                "components": n_comp,
                "max_degree": graph.max_degree(),
            })));
            Status::Pass
        }
        Command::Functional => {
            let f: FunctionalConfig = load(cli)?;
            let (pts, marks) = go!(source_points(&f.source, cli.seed));
            let regions = vec![f.region.clone(); f.functionals.len()];
            let values = go!(evaluate_many(&f.functionals, &pts, marks.as_deref(), &regions));
            let out: Vec<_> = f
                .functionals
                .iter()
                .zip(&values)
                .map(|(s, v)| serde_json::json!({ "functional": s.label(), "value": fmt17(*v) }))
                .collect();
            go!(print_json(&out));
            Status::Pass
        }
        Command::Percolation => {
            let mut p: PercolationConfig = load(cli)?;
            if let Some(s) = cli.seed {
                p.seed = s;
            }
            let window = go!(LatticeWindow::scaled(&p.b0, p.t));
            let x = go!(sample_lattice(p.p, &window, p.seed));
            let region = p.region.clone().unwrap_or_else(|| p.b0.clone());
            let clusters = cluster_analysis(&x);
            if let Some(d) = go!(out_dir(cli)) {
                let cfg_path = d.join("lattice.json");
                go!(fs::write(&cfg_path, go!(x.to_json())).map_err(|e| Error::io(&cfg_path, e)));
                let path = d.join("clusters.csv");
                let f = go!(fs::File::create(&path).map_err(|e| Error::io(&path, e)));
                go!(clusters.write_csv(f));
            }
            let mut values = Vec::new();
            for m in &p.measures {
                values.push(serde_json::json!({ "measure": m.label(), "value": fmt17(go!(m.evaluate(&x, &region))) }));
            }
            go!(print_json(&serde_json::json!({
                "sites": window.len(),
                "occupied": x.occupied_count(),
                "clusters": clusters.count(),
                "largest": clusters.max_size(),
                "measures": values,
            })));
            Status::Pass
        }
        Command::StabRadius => {
            let mut c: StabRadiusConfig = load(cli)?;
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            if cli.threads.is_some() {
                c.threads = cli.threads;
            }
            let r = go!(stab_radius_experiment(&c));
            if let Some(d) = go!(out_dir(cli)) {
                go!(write_json(&r, &d.join("stab_radius.json")));
            }
            let probes: usize = r.entries.iter().map(|e| e.report.probes_run).sum();
            println!(
                "{} {}: {} configurations, {} probes, {} exact-radius failures",
                if r.passed { "PASS" } else { "FAIL" },
                r.builder.name(),
                r.entries.len(),
                probes,
                r.exact_failures
            );
            if r.passed {
                Status::Pass
            } else {
                Status::CriterionFailure
            }
        }
        Command::DeltaInf => {
            let mut c: DeltaInfConfig = load(cli)?;
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            let r = go!(estimate_delta_infinity(&c.functional, c.dim, c.lambda, &c.schedule, c.samples, c.seed));
            if let Some(d) = go!(out_dir(cli)) {
                go!(write_json(&r, &d.join("delta_inf.json")));
            }
            go!(print_json(&r));
            Status::Pass
        }
        Command::Sigma => {
            let mut c: SigmaConfig = load(cli)?;
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            let ing = if !c.lattice_functionals.is_empty() {
                go!(estimate_sigma_lattice(&c.lattice_functionals, c.dim, c.p, &c.schedule, c.outer_n, c.inner_m, c.seed))
            } else {
                go!(estimate_sigma_continuum(&c.functionals, c.dim, c.lambda, &c.schedule, c.outer_n, c.inner_m, c.seed))
            };
            let tau = match (&c.regions, &c.b0) {
                (Some(r), Some(b)) => Some(go!(estimate_tau(&ing, r, b))),
                _ => None,
            };
            let out = serde_json::json!({ "ingredients": ing, "tau": tau });
            if let Some(d) = go!(out_dir(cli)) {
                go!(write_json(&out, &d.join("sigma.json")));
            }
            go!(print_json(&out));
            Status::Pass
        }
        Command::Clt | Command::Depoisson | Command::FixedN => {
            let mut cfg: ExperimentConfig = load(cli)?;
            apply_overrides(cli, &mut cfg);
            let result = match cli.command {
                Command::Clt => clt_experiment(&cfg),
                Command::Depoisson => depoisson_experiment(&cfg),
                _ => fixed_n_experiment(&cfg),
            };
            let (report, mats) = go!(result);
            if let Some(d) = go!(out_dir(cli)) {
                let files = go!(emit_report(&report, &mats, d));
                println!("wrote {} files to {}", files.len(), d.display());
            }
            print_criteria(&report)
        }
        Command::Empirical => {
            let mut cfg: EmpiricalConfig = load(cli)?;
            apply_overrides(cli, &mut cfg.experiment);
            let (report, mats) = go!(empirical_process_experiment(&cfg.experiment, &cfg.s_values));
            if let Some(d) = go!(out_dir(cli)) {
                go!(write_json(&report, &d.join("empirical.json")));
                let covs: Vec<_> = report.scales.iter().map(|s| (s.scale, &s.covariance)).collect();
                go!(write_covariance_csv(&covs, &d.join("covariance.csv")));
                for (k, m) in mats.iter().enumerate() {
                    go!(write_plot_data(m, d, &k.to_string()));
                }
            }
            for s in &report.scales {
                println!(
                    "{} scale {}: symmetric = {}, min eigenvalue = {} (SE {})",
                    if s.symmetric && s.psd_within_noise { "PASS" } else { "FAIL" },
                    fmt17(s.scale),
                    s.symmetric,
                    fmt17(s.min_eigenvalue),
                    fmt17(s.min_eigenvalue_se)
                );
            }
            if report.passed {
                Status::Pass
            } else {
                Status::CriterionFailure
            }
        }
        Command::Report { input } => {
            let path = input.as_ref().or(cli.config.as_ref()).ok_or_else(|| {
                ConfigError(Error::InvalidInput("report needs an input path".into()))
            })?;
            let text = fs::read_to_string(path).map_err(|e| ConfigError(Error::io(path, e)))?;
            let report: CltReport = serde_json::from_str(&text).map_err(|e| ConfigError(Error::Json(e)))?;
            print_criteria(&report)
        }
    };
    Ok(status)
}

fn fail(e: Error) -> Status {
    eprintln!("error: {e}");
    if e.is_config_error() {
        Status::InvalidConfig
    } else {
        Status::RuntimeError
    }
}

/// Parses `args` and runs the selected subcommand.
pub fn run_with_args<I, T>(args: I) -> Status
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::InvalidConfig } else { Status::Pass };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return Status::InvalidConfig;
        }
        // Ignored if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(&cli) {
        Ok(s) => s,
        Err(ConfigError(e)) => {
            eprintln!("error: {e}");
            Status::InvalidConfig
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run_with_args(std::env::args_os()) as u8)
}
