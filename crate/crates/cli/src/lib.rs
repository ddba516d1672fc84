//! Experiment runner: `heislab <experiment> --config <file> [--seed N] [--out DIR]`.
//!
//! A config is a JSON object `{"seed": N, "output_dir": "...", "params": {...}}`; every key is
//! optional and `params` is checked against the experiment's parameter struct. Each run writes
//! `report.json`, `schema.json` and its CSV tables into the output directory.

pub mod experiments;
pub mod report;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::path::{Path, PathBuf};

pub use report::{Assertion, Outcome, Relation, Report, Table};

pub fn version() -> String {
    format!("heislab {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    AuditMaps,
    Growth,
    NetIp,
    Transfer,
    CapacityScan,
    Coarea,
    Poincare,
    Green,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::AuditMaps,
        Experiment::Growth,
        Experiment::NetIp,
        Experiment::Transfer,
        Experiment::CapacityScan,
        Experiment::Coarea,
        Experiment::Poincare,
        Experiment::Green,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::AuditMaps => "audit-maps",
            Experiment::Growth => "growth",
            Experiment::NetIp => "net-ip",
            Experiment::Transfer => "transfer",
            Experiment::CapacityScan => "capacity-scan",
            Experiment::Coarea => "coarea",
            Experiment::Poincare => "poincare",
            Experiment::Green => "green",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional in the file; must match the command-line experiment when present.
    #[serde(default)]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "empty_params")]
    pub params: Value,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn empty_params() -> Value {
    Value::Object(Default::default())
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { experiment: None, seed: 0, params: empty_params(), output_dir: None }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, config or parameters: exit 2.
    Usage(String),
    /// Computation or I/O failure: exit 1.
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<heislab_core::Error> for CliError {
    fn from(e: heislab_core::Error) -> Self {
        match e {
            heislab_core::Error::InvalidArgument(_) | heislab_core::Error::MemoryGuard(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "heislab", version, about = "Reproducible numerical audits on the Heisenberg group")]
pub struct Args {
    pub experiment: Experiment,
    /// JSON config file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("parsing {}: {e}", path.display())))
}

/// Parses experiment parameters, rejecting unknown keys.
pub fn parse_params<T: for<'de> Deserialize<'de>>(params: &Value) -> CliResult<T> {
    serde_json::from_value(params.clone()).map_err(|e| CliError::Usage(format!("invalid params: {e}")))
}

/// Runs one experiment without touching the filesystem.
pub fn run_experiment(experiment: Experiment, seed: u64, params: &Value) -> CliResult<Outcome> {
    use experiments::*;
    match experiment {
        Experiment::AuditMaps => audit_maps::run(seed, params),
        Experiment::Growth => growth::run(seed, params),
        Experiment::NetIp => net_ip::run(seed, params),
        Experiment::Transfer => transfer::run(seed, params),
        Experiment::CapacityScan => capacity::run(seed, params),
        Experiment::Coarea => coarea::run(seed, params),
        Experiment::Poincare => poincare::run(seed, params),
        Experiment::Green => green::run(seed, params),
    }
}

/// Runs and writes outputs; the echoed config has the effective seed and parameters.
pub fn run(experiment: Experiment, config: &ExperimentConfig, out: &Path) -> CliResult<Report> {
    if let Some(e) = config.experiment {
        if e != experiment {
            return Err(CliError::Usage(format!("config is for `{e}`, not `{experiment}`")));
        }
    }
    let outcome = run_experiment(experiment, config.seed, &config.params)?;
    let echo = serde_json::json!({
        "experiment": experiment.name(),
        "seed": config.seed,
        "params": config.params,
    });
    report::write_outputs(out, experiment.name(), config.seed, echo, &outcome).map_err(|e| CliError::Runtime(format!("{e:#}")))
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut config = match &args.config {
        Some(p) => match load_config(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{e}");
                return EXIT_USAGE;
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("heislab-out").join(args.experiment.name()));
    match run(args.experiment, &config, &out) {
        Ok(report) => {
            for a in report.assertions.iter().filter(|a| !a.pass) {
                eprintln!(
                    "FAILED {}: observed {} {} {} (tol {})",
                    a.name,
                    a.observed,
                    serde_json::to_value(a.relation).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    a.expected,
                    a.tol
                );
            }
            println!(
                "{}: {}/{} assertions passed, outputs in {}",
                report.experiment,
                report.assertions.iter().filter(|a| a.pass).count(),
                report.assertions.len(),
                out.display()
            );
            if report.pass {
                EXIT_OK
            } else {
                EXIT_ASSERTION
            }
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("{e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("{e}");
            EXIT_ASSERTION
        }
    }
}
