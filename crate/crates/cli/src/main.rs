//! `foptd-tune`: tune, analyze and simulate PID loops around FOPTD processes.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{AnalyzeArgs, CompareArgs, ReproduceArgs, SimulateArgs, TuneArgs};
use crate::output::CliError;

#[derive(Debug, Parser)]
#[command(name = "foptd-tune", version, about = "PID tuning and analysis for first-order-plus-dead-time processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute controller settings with one tuning method.
    Tune(TuneArgs),
    /// Stability interval, gain margin or closed-loop poles.
    Analyze(AnalyzeArgs),
    /// Simulate the unit-step response of one loop.
    Simulate(SimulateArgs),
    /// Simulate several loops and tabulate their step-response metrics.
    Compare(CompareArgs),
    /// Regenerate a bundled scenario for the example process.
    Reproduce(ReproduceArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return CliError::usage(e.to_string().trim()).report();
        }
    };
    let outcome = match cli.command {
        Command::Tune(args) => commands::tune(&args),
        Command::Analyze(args) => commands::analyze(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Compare(args) => commands::compare(&args),
        Command::Reproduce(args) => commands::reproduce(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
