//! Command-line frontend: argument parsing, run configuration and output.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

pub use args::Cli;
pub use config::RunConfig;

/// Why a run did not succeed.
#[derive(Debug)]
pub enum CliError {
    /// Malformed flags, descriptors or configuration (exit 2).
    Usage(String),
    /// A verification failed or the library reported an error (exit 1).
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<holosup::Error> for CliError {
    fn from(e: holosup::Error) -> Self {
        use holosup::Error as E;
        match e {
            E::Parse(_) | E::Domain(_) | E::Membership { .. } => CliError::Usage(e.to_string()),
            other => CliError::Check(other.to_string()),
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Results go to standard output (or the configured files); diagnostics
/// and notes go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("holosup: {e}");
            e.exit_code()
        }
    }
}
