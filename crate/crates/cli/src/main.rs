//! `eigenbath`: eigenvector inversion histograms, Bloch-z trajectories,
//! `V_R` sweeps and summaries for a two-level system on a banded bath.
//!
//! Exit status: 0 ok, 1 computation failure, 2 config error, 3 io error,
//! 4 resource limit.

mod config;
mod error;
mod output;
mod svg;
mod tasks;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig, Task, SEED_ENV};
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "eigenbath", version, about = "Eigenvector inversion statistics of a two-level system coupled to a banded bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Histogram of pooled eigenvector inversions (CSV + SVG).
    LambdaDist(Overrides),
    /// Bloch-z trajectory from the mixed-band initial state (CSV + SVG).
    Evolve(Overrides),
    /// Inversion variance while rescaling the bath spectrum (CSV + SVG).
    Sweep(Overrides),
    /// Tabulated analytic GUE inversion density.
    GuePdf(Overrides),
    /// Summary record: mean, variance, canonical and predicted inversion, V_R.
    Report(Overrides),
    /// Run the task named by `task` in the config file.
    Run(Overrides),
}

fn execute(cli: Cli) -> CliResult<String> {
    let (task, flags) = match cli.command {
        Command::LambdaDist(f) => (Some(Task::LambdaDist), f),
        Command::Evolve(f) => (Some(Task::Evolve), f),
        Command::Sweep(f) => (Some(Task::Sweep), f),
        Command::GuePdf(f) => (Some(Task::GuePdf), f),
        Command::Report(f) => (Some(Task::Report), f),
        Command::Run(f) => (None, f),
    };
    if task.is_none() && flags.config.is_none() {
        return Err(CliError::config("`run` needs --config"));
    }
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = RunConfig::resolve(task, &flags, env_seed.as_deref())?;
    let artifacts = tasks::run(&cfg)?;
    artifacts.write()?;
    Ok(artifacts.stdout)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(error::EXIT_IO);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("eigenbath: {e}");
            e.exit_code()
        }
    }
}
