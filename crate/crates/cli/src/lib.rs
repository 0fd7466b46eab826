//! Command-line front end: one subcommand per experiment, every result written
//! as a [`ResultDocument`] in CSV or JSON.
//!
//! Exit codes: 0 on success, 2 for usage, parse and validation errors, 1 for
//! numeric failures and I/O errors.

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub mod args;
pub mod codebook_io;
mod commands;
pub mod document;

pub use args::Cli;
pub use codebook_io::{load_codebook, parse_codebook, save_codebook};
pub use document::{Cell, Format, ResultDocument, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// `--help` / `--version` output; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) | CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<wishart_stc::Error> for CliError {
    fn from(e: wishart_stc::Error) -> Self {
        use wishart_stc::Error as E;
        match e {
            E::InvalidArgument(_) | E::Infeasible(_) => CliError::Usage(e.to_string()),
            E::NumericFailure { .. } | E::DegenerateFit(_) => CliError::Numeric(e.to_string()),
        }
    }
}

fn parse(argv: &[String]) -> Result<Cli, CliError> {
    Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                CliError::Info(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    })
}

/// Parses `argv` (program name first) and executes the subcommand without
/// writing any output.
pub fn execute(argv: &[String]) -> Result<ResultDocument, CliError> {
    commands::dispatch(&parse(argv)?)
}

/// Runs the command line and returns the process exit code.
pub fn run(argv: &[String]) -> i32 {
    match run_inner(argv) {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.trim_end());
            e.exit_code()
        }
    }
}

fn run_inner(argv: &[String]) -> Result<(), CliError> {
    let cli = parse(argv)?;
    let doc = commands::dispatch(&cli)?;
    let bytes = doc.encode(cli.format).map_err(CliError::Io)?;
    write_output(cli.out.as_ref(), &bytes)
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
