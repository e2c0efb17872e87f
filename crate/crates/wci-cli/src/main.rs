//! `wci` — conditional-independence and two-sample testing with
//! transport-cost statistics, plus the accompanying bound calculators.
//!
//! Exit codes: 0 on success, 2 on invalid input or parameters, 3 when the
//! dataset leaves nothing testable (for example, every bin is underpopulated).

mod commands;
mod manifest;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// CLI failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    /// Invalid input or parameters: exit code 2.
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    /// Structurally sound input on which no test can run: exit code 3.
    pub fn infeasible(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<wci_core::Error> for CliError {
    fn from(err: wci_core::Error) -> Self {
        if err.is_infeasible() {
            CliError::infeasible(err.to_string())
        } else {
            CliError::input(err.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "wci",
    version,
    about = "Transport-cost two-sample and conditional-independence testing",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split one paired sample and test dependence between its halves.
    TwoSample(commands::TwoSampleArgs),
    /// Bin on z and test x ⫫ y within every populated bin.
    CiTest(commands::CiTestArgs),
    /// Stand-alone calculators for the finite-sample bounds.
    Bounds {
        #[command(subcommand)]
        command: commands::BoundsCommand,
        /// Write the JSON report here instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Replicate a scenario-plus-test pair and compare empirical error
    /// frequencies with the reported bounds.
    Simulate(commands::SimulateArgs),
    /// Sample a synthetic scenario to CSV.
    Gen(commands::GenArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::TwoSample(args) => commands::two_sample(args),
        Command::CiTest(args) => commands::ci_test(args),
        Command::Bounds { command, out } => commands::bounds(command, out.as_ref()),
        Command::Simulate(args) => commands::simulate(args),
        Command::Gen(args) => commands::gen(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code)
        }
    }
}
