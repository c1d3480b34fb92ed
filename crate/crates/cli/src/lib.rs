//! Library behind the `ptframe` binary: option resolution, the four
//! subcommands and their CSV/JSON writers.

pub mod check;
pub mod config;
pub mod output;

use std::fmt;

use ptframe::Error;

use crate::config::{figure_defaults, Cli, Command, Job};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or parameter combination.
    Config(String),
    Numerics(Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration: {m}"),
            CliError::Numerics(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerics(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Process exit status.
///
/// 0 success, 1 I/O, 2 configuration, 3 spectral singularity (including a
/// singular supermode map), 4 any other numerical failure.
impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerics(e) => match e.root() {
                Error::Parameter(_) => 2,
                Error::SpectralSingularity(_) | Error::SingularSupermodes => 3,
                _ => 4,
            },
        }
    }
}

/// Honours `PTFRAME_THREADS` for the sweep's worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PTFRAME_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "PTFRAME_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    if n == 0 {
        return Err(CliError::Config(
            "PTFRAME_THREADS must be at least 1".into(),
        ));
    }
    // a second call (tests in one process) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Figure { number, opts } => {
            let user = opts.with_file()?;
            let (defaults, unprinted) = figure_defaults(number, &user);
            let job = Job::resolve(user.or(defaults), unprinted, true)?;
            output::write_sweep(&job, &output::run_sweep(&job)?, Some(number))
        }
        Command::Sweep(opts) => {
            let job = Job::resolve(opts.with_file()?, Vec::new(), true)?;
            output::write_sweep(&job, &output::run_sweep(&job)?, None)
        }
        Command::EpFind(opts) => {
            let job = Job::resolve(opts.with_file()?, Vec::new(), true)?;
            output::write_eps(&job, &output::run_sweep(&job)?)
        }
        Command::Check(opts) => {
            let job = Job::resolve(opts.with_file()?, Vec::new(), false)?;
            let report = check::run_check(&job)?;
            output::emit_json(&job, &report)
        }
    }
}

/// Convenience for tests: parse an argument list and run it.
pub fn run_args<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    run(cli)
}
