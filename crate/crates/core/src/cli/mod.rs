//! Command-line front end: configuration, command dispatch and record output.
//!
//! Every command produces a [`Report`]: a header echoing the seed, one JSON
//! record per target/pair/sample, a summary record, and optional CSV files.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use thiserror::Error;

use crate::error::GeoError;

pub use config::{
    BarycenterSection, BoundSection, ChartSection, ConvexitySection, ExperimentConfig, FunctionSpec, GeodesicSection,
    HullSection, JacobianSection, LemmaSection, LipschitzSection, MetricName, MetricSection, SimplexSection,
    SolverSection, StarDemo, StarSection,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(GeoError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 1,
            Self::Solver(_) => 2,
        }
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::DimensionMismatch { .. }
            | GeoError::Domain(_)
            | GeoError::OutsideChart { .. }
            | GeoError::InvalidStepsize(_)
            | GeoError::DegenerateSimplex { .. } => Self::Config(e.to_string()),
            other => Self::Solver(other),
        }
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub records: Vec<Value>,
    /// CSV exports as `(file name, contents)`.
    pub files: Vec<(String, String)>,
    /// Whether every declared check passed.
    pub passed: bool,
}

impl Report {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            3
        }
    }

    pub fn summary(&self) -> Option<&Value> {
        self.records.iter().rev().find(|r| r["record"] == "summary")
    }

    pub fn write_files(&self, dir: &std::path::Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "geoconvex", version, about = "Geodesic barycenters, coverage sweeps and convexity probes")]
pub struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for randomized commands (required by jacobian-check, convexity, lipschitz).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for CSV exports.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags overriding config fields.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true, value_enum)]
    pub metric: Option<MetricName>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub chart_radius: Option<f64>,
    #[arg(long, global = true)]
    pub bvp_tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub ode_steps: Option<usize>,
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Scale parameter for barycenter, hull, lemma and bound.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub eta_max: Option<f64>,
    #[arg(long, global = true)]
    pub angular: Option<usize>,
    #[arg(long, global = true)]
    pub radial: Option<usize>,
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    #[arg(long, global = true)]
    pub n_pairs: Option<usize>,
    #[arg(long, global = true)]
    pub n_t: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve the geodesic boundary-value problem between two points.
    Geodesic {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        p: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        q: Option<Vec<f64>>,
    },
    /// Iterated barycenter of the simplex vertices.
    Barycenter {
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Sample the iterated simplex on a stepsize grid.
    Hull,
    /// Compare the closed-form stepsize Jacobian with finite differences.
    JacobianCheck,
    /// Coverage sweep of a ball around the origin.
    Lemma,
    /// Sampled geodesic convexity check.
    Convexity,
    /// Upper-bound certificate for a convex function on the covered ball.
    Bound,
    /// Empirical Lipschitz constant.
    Lipschitz,
    /// Exact star-space demos.
    Star {
        #[arg(long, value_enum)]
        demo: Option<StarDemo>,
        #[arg(long)]
        function: Option<String>,
        #[arg(long = "star-metric")]
        star_metric: Option<String>,
        #[arg(long)]
        max_p: Option<u64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Geodesic { .. } => "geodesic",
            Self::Barycenter { .. } => "barycenter",
            Self::Hull => "hull",
            Self::JacobianCheck => "jacobian-check",
            Self::Lemma => "lemma",
            Self::Convexity => "convexity",
            Self::Bound => "bound",
            Self::Lipschitz => "lipschitz",
            Self::Star { .. } => "star",
        }
    }

    fn randomized(&self) -> bool {
        matches!(self, Self::JacobianCheck | Self::Convexity | Self::Lipschitz)
    }
}

fn apply_overrides(config: &mut ExperimentConfig, o: &Overrides, command: &Command) {
    if let Some(m) = o.metric {
        config.metric.kind = m;
    }
    if let Some(d) = o.dim {
        config.metric.dim = d;
    }
    if let Some(r) = o.chart_radius {
        config.chart.radius = r;
    }
    if let Some(t) = o.bvp_tolerance {
        config.solver.bvp_tolerance = t;
    }
    if let Some(n) = o.ode_steps {
        config.solver.ode_steps = n;
    }
    if let Some(s) = o.fd_step {
        config.solver.fd_step = s;
    }
    if let Some(h) = o.h {
        config.barycenter.h = h;
        config.hull.h = h;
        config.lemma.h = h;
        config.bound.h = Some(h);
    }
    if let Some(eta) = o.eta {
        config.lemma.eta = Some(eta);
        config.bound.eta = eta;
    }
    if let Some(e) = o.eta_max {
        config.lemma.eta_max = e;
    }
    if let Some(a) = o.angular {
        config.lemma.angular = a;
    }
    if let Some(r) = o.radial {
        config.lemma.radial = r;
    }
    if let Some(r) = o.resolution {
        config.hull.resolution = r;
    }
    if let Some(n) = o.n_pairs {
        config.convexity.n_pairs = n;
        config.lipschitz.n_pairs = n;
    }
    if let Some(n) = o.n_t {
        config.convexity.n_t = n;
    }
    match command {
        Command::Geodesic { p, q } => {
            if p.is_some() {
                config.geodesic.p = p.clone();
            }
            if q.is_some() {
                config.geodesic.q = q.clone();
            }
        }
        Command::Barycenter { t: Some(t) } => config.barycenter.t = Some(t.clone()),
        Command::Star { demo, function, star_metric, max_p } => {
            if let Some(d) = demo {
                config.star.demo = *d;
            }
            if let Some(f) = function {
                config.star.function = f.clone();
            }
            if let Some(m) = star_metric {
                config.star.metric = m.clone();
            }
            if let Some(p) = max_p {
                config.star.max_p = *p;
            }
        }
        _ => {}
    }
}

/// Resolves the configuration for `cli` (file, then flag overrides).
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    apply_overrides(&mut config, &cli.overrides, &cli.command);
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    config.validate()?;
    Ok(config)
}

/// Runs `command` against a resolved configuration.
pub fn run(command: &Command, config: &ExperimentConfig) -> Result<Report, CliError> {
    if command.randomized() && config.seed.is_none() {
        return Err(CliError::Config(format!("`{}` is randomized and requires --seed", command.name())));
    }
    commands::dispatch(command, config)
}

/// Full pipeline used by the binary: resolve, run, export CSV files.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let config = resolve_config(cli)?;
    let report = run(&cli.command, &config)?;
    if let Some(dir) = &cli.out {
        report.write_files(dir)?;
    }
    Ok(report)
}
