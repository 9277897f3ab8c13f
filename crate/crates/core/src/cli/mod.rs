//! Command-line front end.
//!
//! Every command writes CSV to `--out` (stdout by default). Settings come from
//! flags first, then from the `--config` JSON file, then from built-in
//! defaults. The file holds optional `seed`, `threads` and `strict` keys plus
//! one object per command, keyed by the command name, whose keys are the
//! command's long flags in snake case.

mod commands;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

pub use commands::{BoundsArgs, ChernoffSurfaceArgs, ErrorArgs, InformationArgs, SimulateArgs};

/// Environment variable consulted for the worker count when `--threads` is
/// not given.
pub const THREADS_ENV: &str = "HOM_FP_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hom-fingerprint", version, about = "Two-photon quantum fingerprinting model")]
pub struct Cli {
    /// Output file for the CSV dataset [default: stdout]
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// JSON configuration file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Seed for stochastic commands
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (overrides HOM_FP_THREADS)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Treat statistical alarms as failures
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gilbert-Varshamov rates and the code-length overhead of the extension
    Bounds(BoundsArgs),
    /// Information comparison against the classical bound
    Information(InformationArgs),
    /// Exact and asymptotic error probability versus detected pairs
    Error(ErrorArgs),
    /// Rescaled Chernoff information for single-photon and Poissonian sources
    ChernoffSurface(ChernoffSurfaceArgs),
    /// Monte Carlo batch compared against the analytic model
    Simulate(SimulateArgs),
}

/// A failure carrying the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(io::Error),
    /// Output was written, but a statistical check tripped under `--strict`.
    Alarm(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Io(_) | CliError::Alarm(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Alarm(m) => write!(f, "alarm: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub(crate) struct ConfigFile {
    seed: Option<u64>,
    threads: Option<usize>,
    strict: Option<bool>,
    bounds: Option<BoundsArgs>,
    information: Option<InformationArgs>,
    error: Option<ErrorArgs>,
    chernoff_surface: Option<ChernoffSurfaceArgs>,
    simulate: Option<SimulateArgs>,
}

fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

fn thread_count(flag: Option<usize>, file: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={s:?} is not a thread count"))),
        Err(_) => Ok(file),
    }
}

/// Settings shared by all commands after merging flags and config.
#[derive(Debug, Clone)]
pub(crate) struct Globals {
    pub seed: u64,
    pub strict: bool,
}

/// Runs a parsed command line, writing the dataset to `--out` or `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let threads = thread_count(cli.threads, file.threads)?;
    if threads == Some(0) {
        return Err(CliError::Usage("thread count must be at least 1".into()));
    }
    let globals = Globals {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        strict: cli.strict || file.strict.unwrap_or(false),
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;

    let mut buffer = Vec::new();
    let outcome = pool.install(|| match cli.command {
        Command::Bounds(a) => commands::bounds(a.merged(file.bounds), &mut buffer),
        Command::Information(a) => commands::information(a.merged(file.information), &mut buffer),
        Command::Error(a) => commands::error(a.merged(file.error), &mut buffer),
        Command::ChernoffSurface(a) => {
            commands::chernoff_surface(a.merged(file.chernoff_surface), &mut buffer)
        }
        Command::Simulate(a) => commands::simulate(a.merged(file.simulate), &globals, &mut buffer),
    });
    // an alarm still leaves a complete dataset behind
    if matches!(outcome, Ok(()) | Err(CliError::Alarm(_))) {
        match &cli.out {
            Some(path) => fs::write(path, &buffer)?,
            None => stdout.write_all(&buffer)?,
        }
    }
    outcome
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
