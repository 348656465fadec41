//! Command-line front end for the `biharm` binary.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 solver failure,
//! 4 I/O failure, 5 a check out of tolerance (reports are still written).

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("I/O failure: {0}")]
    Io(String),
    #[error("tolerance breach: {0}")]
    Breach(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
            CliError::Breach(_) => 5,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "biharm",
    version,
    about = "Biharmonic ground states and log-Sobolev constants"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for the random test fields (overrides `seed` in the config).
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Compute the ground state and write profile.csv and the report.
    Solve,
    /// Recheck a stored profile against the equation and the manifold.
    Verify {
        /// Profile CSV to check (default: profile.csv in the output directory).
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
    },
    /// Solve the logarithmic model and check the inequalities on a test battery.
    Logsob,
    /// Solve every configured (N, model) pair in parallel.
    Sweep,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref(), cli.out.as_deref(), cli.seed)?;
    match &cli.command {
        Command::Solve => commands::run_solve(&cfg),
        Command::Verify { profile } => commands::run_verify(&cfg, profile.as_deref()),
        Command::Logsob => commands::run_logsob(&cfg),
        Command::Sweep => commands::run_sweep(&cfg),
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("biharm: {e}");
            e.exit_code()
        }
    }
}
