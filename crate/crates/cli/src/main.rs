//! `gt2` — estimation for the Gumbel type-II distribution under adaptive
//! type-II progressive hybrid censoring.
//!
//! Every command writes a machine-readable `report.json` (stable field
//! names, numbers at 10 significant digits, full resolved configuration
//! embedded) plus command-specific CSV tables into the output directory.
//!
//! Exit codes: 0 success, 2 invalid configuration or usage, 3 estimation
//! failure, 4 I/O failure.

mod commands;
mod config;
mod ingest;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Estimation(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Estimation(m) => write!(f, "estimation failed: {m}"),
            CliError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Estimation(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<gt2::Error> for CliError {
    fn from(e: gt2::Error) -> Self {
        match e {
            gt2::Error::Domain(_) | gt2::Error::InvalidPlan(_) | gt2::Error::InvalidSample(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Estimation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gt2",
    version,
    about = "Gumbel type-II inference under adaptive progressive hybrid censoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum likelihood fit
    Fit(RunArgs),
    /// Maximum product spacing fit
    Mps(RunArgs),
    /// MCMC posterior estimates under SELF/LINEX/GELF losses plus HPD intervals
    Bayes(RunArgs),
    /// Asymptotic, bootstrap and HPD intervals
    Intervals(RunArgs),
    /// Goodness-of-fit report on complete data
    Gof(RunArgs),
    /// Monte Carlo evaluation campaign from a config file
    Simulate(RunArgs),
    /// Apply a censoring plan to a data set
    Censor(RunArgs),
    /// Emit ecdf/qq/boxplot/ttt and profile log-likelihood tables
    Plotdata(RunArgs),
}

/// Options shared by every subcommand; a TOML config file may set any of
/// them, with command-line flags taking precedence.
#[derive(Args, Clone, Debug, Default)]
struct RunArgs {
    /// Input data file (one value per line or comma-separated)
    #[arg(long, conflicts_with = "bundled_covid")]
    input: Option<PathBuf>,
    /// Use the bundled Covid-19 death-rate data set
    #[arg(long)]
    bundled_covid: bool,
    /// Units on test (defaults to the data length)
    #[arg(long)]
    n: Option<usize>,
    /// Target number of observed failures
    #[arg(long)]
    m: Option<usize>,
    /// Threshold time T (accepts "inf"; default inf)
    #[arg(long = "T", value_parser = parse_threshold)]
    threshold: Option<f64>,
    /// Named removal scheme kind: 1, 2 or 3
    #[arg(long, conflicts_with = "removals")]
    scheme: Option<u8>,
    /// Explicit removal vector in run-length syntax, e.g. "0*39,50"
    #[arg(long)]
    removals: Option<String>,
    /// RNG seed for censoring, MCMC and bootstrap streams
    #[arg(long)]
    seed: Option<u64>,
    /// Replications override for `simulate`
    #[arg(long)]
    reps: Option<usize>,
    /// Loss selection for `bayes`: self, linex, gelf or all
    #[arg(long)]
    loss: Option<String>,
    /// LINEX asymmetry values
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// General entropy exponents
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// Gamma prior hyper-parameters "a,b,c,d"
    #[arg(long)]
    prior: Option<String>,
    /// MCMC chain length
    #[arg(long = "chain")]
    chain: Option<usize>,
    /// MCMC burn-in (default: chain/5)
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
    /// Interval level complement (default 0.05 for 95% intervals)
    #[arg(long)]
    gamma: Option<f64>,
    /// Bootstrap resample count
    #[arg(long = "boot-b")]
    boot_b: Option<usize>,
    /// Comparator models for `gof`, e.g. "NH:138.7024,0.0003" (repeatable)
    #[arg(long)]
    comparator: Vec<String>,
    /// Output directory (default "gt2-out")
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file mirroring these flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number or 'inf'"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("threshold must be > 0, got {v}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => commands::fit(&args, false),
        Command::Mps(args) => commands::fit(&args, true),
        Command::Bayes(args) => commands::bayes(&args),
        Command::Intervals(args) => commands::intervals(&args),
        Command::Gof(args) => commands::gof(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Censor(args) => commands::censor(&args),
        Command::Plotdata(args) => commands::plotdata(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
