//! Library half of the `modfront` command-line driver: the flag grammar,
//! configuration files, output writers and one function per subcommand.
//!
//! Exit-code contract: 0 on success, 1 on a domain error (the error name is
//! printed on stderr), 2 on a usage error.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

pub use config::{Overrides, RunConfig};

use args::{Cli, Command};
use modfront_core::model::ScenarioTag;
use output::Output;
use thiserror::Error;

/// Failures of a command-line run.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed invocation or configuration file.
    #[error("{0}")]
    Usage(String),
    /// A documented failure of a computation.
    #[error(transparent)]
    Domain(#[from] modfront_core::Error),
    /// Writing an output file failed.
    #[error("cannot write {path}: {source}")]
    Io {
        /// Offending path.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Some acceptance criteria did not pass.
    #[error("criteria {0} failed")]
    AcceptanceFailed(String),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable name printed on stderr.
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Domain(e) => e.name(),
            CliError::Io { .. } => "Io",
            CliError::AcceptanceFailed(_) => "AcceptanceFailed",
        }
    }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(path) => config::read_config(path)?,
        None => Overrides::default(),
    };
    let merged = file.overridden_by(cli.global.overrides());
    let out = Output::new(cli.global.out.clone())?;
    let jobs = cli.global.jobs.unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let resolve = |default: Option<ScenarioTag>| RunConfig::resolve(&merged, default);
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(&resolve(None)?, a, &out),
        Command::Wave(a) => commands::wave(&resolve(None)?, a, &out),
        Command::Reduced(a) => commands::reduced(&resolve(None)?, a, &out),
        Command::Shoot(a) => commands::shoot(&resolve(None)?, a, &out),
        Command::Bifurcate(a) => commands::bifurcate(&resolve(Some(ScenarioTag::II))?, a, &out),
        Command::Front(a) => commands::front(&resolve(None)?, a, &out),
        Command::Simulate(a) => commands::simulate(&resolve(None)?, a, &out),
        Command::Verify(a) => commands::verify(a, jobs, &out),
    }
}
