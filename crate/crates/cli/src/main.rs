// SPDX-License-Identifier: Apache-2.0

//! `synflow`: train the flow-exploration agent, run baselines, and tabulate
//! results.

mod commands;
mod compare;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{output_dir, RunArgs};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "synflow", version, about = "AIG optimization flow exploration with an actor-critic agent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the agent and keep the best design it finds.
    Train(RunArgs),
    /// Greedy area descent: adopt the smallest one-step result until area stalls.
    Greedy(RunArgs),
    /// Apply a fixed flow read from --script.
    Script(RunArgs),
    /// Uniformly random flows with the agent's step budget.
    Random(RunArgs),
    /// Print graph statistics.
    Stats(RunArgs),
    /// Tabulate finished runs against their initial designs.
    Compare {
        /// Run directories, or directories containing run directories.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Where to write comparison.csv and traces.csv.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write the generated desk benchmarks as binary AIGER files.
    GenBench {
        #[arg(long)]
        output: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Train(args) => commands::train(&args),
        Command::Greedy(args) => commands::greedy_cmd(&args),
        Command::Script(args) => commands::script(&args),
        Command::Random(args) => commands::random(&args),
        Command::Stats(args) => commands::stats(&args),
        Command::Compare { runs, output } => compare::compare(&runs, &output_dir(output.as_deref(), "compare", "runs")),
        Command::GenBench { output } => commands::gen_bench(&output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Usage(_) => "usage",
                CliError::Input(_) => "input",
                CliError::Internal(_) => "internal",
            };
            eprintln!("synflow: {kind} error: {e}");
            e.exit_code()
        }
    }
}
