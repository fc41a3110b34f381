//! The `msa` command-line tool: analytic sweeps and Monte Carlo runs
//! written as CSV.

pub mod commands;
pub mod config;
pub mod output;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use config::{Experiment, Sweep, SweepVar};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("I/O failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "msa",
    version,
    about = "Massive and sporadic access: analytics and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment file; omitted fields use the reference setup.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed; overrides `sim.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Sweep α over `start:stop:points` (linear), replacing the config sweep.
    #[arg(long, global = true, value_name = "START:STOP:POINTS")]
    pub alpha_sweep: Option<String>,
    /// Overrides `sim.num_realizations`.
    #[arg(long, global = true)]
    pub realizations: Option<usize>,
    /// Overrides `sim.num_slots`.
    #[arg(long, global = true)]
    pub slots: Option<usize>,
    /// Slots discarded before estimating.
    #[arg(long, global = true)]
    pub warmup: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// MSA region corner (λ₀, ξ₀).
    Region,
    /// Interference- and noise-limited boundaries and the regime of each point.
    Regimes,
    /// Backlogged interference and success correlations, and the correlation peak.
    Correlate,
    /// High-mobility stationary solution.
    Analytic,
    /// Monte Carlo simulation beside the analytic solution.
    Simulate,
    /// Oracle checks; exits 2 if any fails.
    Selftest,
}

#[derive(Serialize)]
struct Header<'a> {
    command: Command,
    experiment: &'a Experiment,
}

fn load(cli: &Cli) -> Result<Experiment, CliError> {
    let mut exp = match &cli.config {
        Some(path) => Experiment::from_path(path)?,
        None => Experiment::from_json("{}")?,
    };
    if let Some(seed) = cli.seed {
        exp.sim.seed = seed;
    }
    if let Some(n) = cli.realizations {
        exp.sim.num_realizations = n;
    }
    if let Some(n) = cli.slots {
        exp.sim.num_slots = n;
    }
    if let Some(n) = cli.warmup {
        exp.sim.warmup = n;
    }
    if let Some(range) = &cli.alpha_sweep {
        exp.sweep = Some(Sweep::parse_range(SweepVar::Alpha, range)?);
    }
    exp.sim.sim_config()?;
    Ok(exp)
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var("MSA_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "MSA_THREADS: expected a positive integer, got {v:?}"
                ))
            })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let exp = load(cli)?;
    let pool = thread_pool()?;
    let (table, all_passed) = pool.install(|| -> Result<_, CliError> {
        Ok(match cli.command {
            Command::Region => (commands::region(&exp)?, true),
            Command::Regimes => (commands::regimes(&exp)?, true),
            Command::Correlate => (commands::correlate(&exp)?, true),
            Command::Analytic => (commands::analytic(&exp)?, true),
            Command::Simulate => (commands::simulate(&exp)?, true),
            Command::Selftest => selftest::selftest(exp.sim.seed),
        })
    })?;
    let header = serde_json::to_string(&Header {
        command: cli.command,
        experiment: &exp,
    })
    .expect("header serializes");
    match &cli.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            table.write_csv(&header, &mut w)?;
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        None => table.write_csv(&header, std::io::stdout().lock())?,
    }
    if !all_passed {
        return Err(CliError::Numeric(
            "selftest: at least one check failed".into(),
        ));
    }
    Ok(())
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("msa: {e}");
            e.exit_code()
        }
    }
}
