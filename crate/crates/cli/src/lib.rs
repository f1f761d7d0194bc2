//! Batch front end for the gSQG laboratory: `run`, `sweep`, `verify`, `lp`
//! and `report`, each driven by one JSON config.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
//! configuration error.

use clap::{Parser, Subcommand};
use serde_json::Value;
use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod plot;

use config::{load_config, LpConfig, RunConfig, SweepConfig, VerifyConfig};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error(transparent)]
    Core(#[from] gsqg::Error),

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use gsqg::Error as E;
        match self {
            CliError::Config(_) | CliError::Schema { .. } => EXIT_CONFIG,
            CliError::Core(
                E::Config(_)
                | E::OutOfRange { .. }
                | E::ExponentMismatch(_)
                | E::InvalidGrid(_)
                | E::GridMismatch(_)
                | E::Unresolved { .. }
                | E::ZeroModeSingularity(_)
                | E::NotGsf1
                | E::HeaderParse(_)
                | E::PayloadLength { .. },
            ) => EXIT_CONFIG,
            _ => EXIT_FAIL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gsqg", version, about = "Generalized SQG numerical laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON config; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads.
    #[arg(long, global = true, env = "GSQG_THREADS")]
    pub threads: Option<usize>,

    /// Seed for random families; overrides the config value.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single simulation with diagnostics and snapshots.
    Run,
    /// Convergence study in α.
    Sweep,
    /// Named inequality suites.
    Verify,
    /// Littlewood-Paley analysis of a snapshot.
    Lp,
    /// Summary JSON and SVG plots for the CSVs in a directory.
    Report {
        /// Directory to scan; defaults to `--out`.
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.config.as_deref();
    match &cli.command {
        Command::Run => commands::run_command(&load_config::<RunConfig>(path)?, &cli.out),
        Command::Sweep => commands::sweep_command(&load_config::<SweepConfig>(path)?, &cli.out),
        Command::Verify => {
            let mut cfg = load_config::<VerifyConfig>(path)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            commands::verify_command(&cfg, &cli.out)
        }
        Command::Lp => commands::lp_command(&load_config::<LpConfig>(path)?, &cli.out),
        Command::Report { dir } => commands::report_command(dir.as_ref().unwrap_or(&cli.out)),
    }
}

/// Runs the selected command inside a pool of `threads` workers.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}
