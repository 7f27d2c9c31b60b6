//! `stablepc` command-line tool.
//!
//! Exit status: 0 success, 2 unusable input, 3 numerical failure.

mod benchmark;
mod common;
mod learn;
mod simgen;
mod stability;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use common::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "stablepc", version, about = "Order-independent PC-family causal structure learning")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a graph from a data or correlation CSV.
    Learn(learn::LearnArgs),
    /// Generate random linear Gaussian replicates.
    Simgen(simgen::SimgenArgs),
    /// Run a simulation sweep and write long-format metric tables.
    Benchmark(benchmark::BenchmarkArgs),
    /// Count how often each edge appears across seeded orderings.
    Stability(stability::StabilityArgs),
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::input("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    match &cli.command {
        Command::Learn(a) => learn::run(a),
        Command::Simgen(a) => simgen::run(a),
        Command::Benchmark(a) => benchmark::run(a),
        Command::Stability(a) => stability::run(a),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on bad arguments
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
