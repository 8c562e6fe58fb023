//! `upir-lab`: construct, analyze, simulate and attack P2P UPIR communities.
//!
//! ```bash
//! upir-lab construct td 3 3 -o pappus.cfg --sidecar pappus.json
//! upir-lab analyze pappus.cfg
//! upir-lab simulate --cfg pappus.cfg --protocol upir1 --steps 500 --seed 1 -o trace.jsonl
//! upir-lab attack --cfg pappus.cfg --trace trace.jsonl --query 0 --mode open
//! upir-lab attack --live --cfg pappus.cfg --protocol upir1 --owner 4 --seed 1
//! ```
//!
//! Exit codes: 0 success, 1 usage, 2 invalid input, 3 runtime failure.

mod analyze;
mod attack;
mod construct;
mod experiment;
mod io;
mod simulate;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "upir-lab", version, about = "Combinatorial configurations for peer-to-peer private retrieval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a named configuration and print it in cfg format.
    Construct(construct::Args),
    /// Report parameters, anonymity partitions and structural predicates as JSON.
    Analyze(analyze::Args),
    /// Run the protocol and print the server/truth trace as JSON lines.
    Simulate(simulate::Args),
    /// Intersection attack on a recorded trace, or a live attack with `--live`.
    Attack(attack::Args),
    /// Run a whole experiment described by a JSON file.
    Experiment(experiment::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Construct(args) => construct::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Attack(args) => attack::run(args),
        Command::Experiment(args) => experiment::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("upir-lab: {e:#}");
            ExitCode::from(io::exit_code(&e))
        }
    }
}
