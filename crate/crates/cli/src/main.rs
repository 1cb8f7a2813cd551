//! `shiftlike`: analysis reports, plot series and witnesses for dissipative
//! composition operators and their weighted-shift factors.

mod analyze;
mod common;
mod series;
mod witness;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shiftlike_core::criteria::{DEFAULT_HORIZON, DEFAULT_LOG_TOL, DEFAULT_Q_MAX};

use common::CliError;

#[derive(Debug, Parser)]
#[command(name = "shiftlike", version, about = "Supercyclicity diagnostics for dissipative composition operators")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Built-in system name or path to a JSON system config.
    #[arg(long, global = true, default_value = "paper-example-sec4")]
    pub system: String,
    /// Exponent of the L^p / ℓ^p space.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_HORIZON)]
    pub horizon: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_Q_MAX)]
    pub q_max: u32,
    /// Natural-log threshold a product must reach to count as vanishing.
    #[arg(long, global = true, default_value_t = DEFAULT_LOG_TOL, allow_hyphen_values = true)]
    pub log_tol: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Emit `generated_at: null` so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full JSON analysis report.
    Analyze(analyze::AnalyzeArgs),
    /// CSV series `n,log_value` for plotting.
    Series(series::SeriesArgs),
    /// Search for and re-verify a witness of the measure-theoretic condition.
    Witness(witness::WitnessArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure {n} threads: {e}")))?;
    }
    match &cli.command {
        Command::Analyze(args) => analyze::run(&cli.common, args),
        Command::Series(args) => series::run(&cli.common, args),
        Command::Witness(args) => witness::run(&cli.common, args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
