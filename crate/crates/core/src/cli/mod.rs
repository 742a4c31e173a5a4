//! The `gapspec` command line: `gapspec <solve|sweep|check> --config run.json
//! [--output out.csv] [--format csv|json]`.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{Command, Format, RunConfig};
pub use output::{parse_level_csv, LevelRow};
pub use run::run;

use crate::error::{GapError, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gapspec", version, about = "Eigenvalues in spectral gaps from two-sided min-max levels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Write here instead of the configured output or stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Solve per-channel and merged levels.
    Solve(CommonArgs),
    /// Follow levels along A0 + tau V.
    Sweep(CommonArgs),
    /// Compare levels with a full diagonalization.
    Check(CommonArgs),
}

impl CliCommand {
    pub fn split(&self) -> (Command, &CommonArgs) {
        match self {
            CliCommand::Solve(a) => (Command::Solve, a),
            CliCommand::Sweep(a) => (Command::Sweep, a),
            CliCommand::Check(a) => (Command::Check, a),
        }
    }
}

/// Size the global worker pool from `GAPSPEC_THREADS` (unset or 0: automatic).
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("GAPSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| GapError::Config(format!("GAPSPEC_THREADS must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn exit_code(err: &GapError) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Run one parsed command line; returns the process exit status.
pub fn main_with(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("gapspec: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let (command, args) = cli.command.split();
    let config = RunConfig::load(&args.config)?;
    let format = args.format.or(config.format).unwrap_or_default();
    let text = run(command, &config, format)?;
    match args.output.as_ref().or(config.output.as_ref()) {
        Some(path) => std::fs::write(path, text).map_err(|source| GapError::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
