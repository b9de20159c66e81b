//! `htts` command-line front end.
//!
//! Exit codes: 0 when a strict-core allocation exists (or the given one is in
//! the strict core), 2 when the core is empty (or the allocation is blocked),
//! 1 on any input error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "htts",
    version,
    about = "Strict-core solver for house-swapping markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a market file and print the strict-core allocation.
    Solve {
        market: PathBuf,
        /// Print one line per trading segment to stderr.
        #[arg(long)]
        trace: bool,
        /// Permute the component search order with this seed.
        #[arg(long, value_name = "N")]
        tiebreak_seed: Option<u64>,
        /// Print operation counts to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Check an allocation against the strict core by exhaustive search.
    Verify {
        market: PathBuf,
        allocation: PathBuf,
    },
    /// Compute the strict core by exhaustive search.
    Oracle { market: PathBuf },
    /// Generate a random market file.
    Gen {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        houses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure operation counts and wall time across market sizes.
    Bench {
        /// Comma-separated house counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Agents per house type.
        #[arg(long, default_value_t = 2.0)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, value_enum, default_value_t = FamilyArg::Random)]
        family: FamilyArg,
        /// Explicitly ranked types per agent for `--family prefix`.
        #[arg(long, default_value_t = 16)]
        prefix_len: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// Uniform random complete rankings.
    Random,
    /// Random head of `--prefix-len` types, remaining types ascending.
    Prefix,
    /// Everyone ranks their own type first; one type retires per step.
    Staircase,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
