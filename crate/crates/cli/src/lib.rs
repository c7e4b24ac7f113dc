//! Command-line front end for `crossover-core`: CSV ingestion, run
//! configuration and the `estimate`, `power`, `samplesize`, `simulate` and
//! `sensitivity` commands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod json;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "crossover", version, about = "Design and analysis of two-period crossover trials")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Default, Args, Serialize)]
pub struct GlobalArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Probability of the treatment-first sequence.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi1: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_star: Option<f64>,
    /// Fill blank covariate cells instead of failing.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "is_false")]
    pub impute_mode: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point estimates, standard errors and one-sided tests from a trial CSV.
    Estimate(commands::estimate::EstimateArgs),
    /// Analytic power curves for the Gaussian model, as CSV.
    Power(commands::power::PowerArgs),
    /// Sample sizes, relative efficiency and the carry-over break-even point.
    Samplesize(commands::samplesize::SampleSizeArgs),
    /// Monte Carlo power study.
    Simulate(commands::simulate::SimulateArgs),
    /// Carry-over sensitivity analysis and tipping point.
    Sensitivity(commands::sensitivity::SensitivityArgs),
}

/// Everything a command produced, not yet written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    /// Main output: JSON, or CSV for `power`.
    pub primary: String,
    /// Additional files to write, such as the simulation table.
    pub files: Vec<(PathBuf, String)>,
}

/// Resolve the configuration and run the command, without touching the
/// output destinations.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let file = cli.global.config.as_deref().map(config::read_config_file).transpose()?;
    match &cli.command {
        Command::Estimate(args) => commands::estimate::run(file, &cli.global, args),
        Command::Power(args) => commands::power::run(file, &cli.global, args),
        Command::Samplesize(args) => commands::samplesize::run(file, &cli.global, args),
        Command::Simulate(args) => commands::simulate::run(file, &cli.global, args),
        Command::Sensitivity(args) => commands::sensitivity::run(file, &cli.global, args),
    }
}

/// [`execute`], then write the primary output to `--out` (or stdout) and
/// any extra files.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let output = execute(cli)?;
    match &cli.global.out {
        Some(path) => std::fs::write(path, &output.primary).map_err(|e| CliError::io(path, e))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.primary.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    for (path, contents) in &output.files {
        std::fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}
