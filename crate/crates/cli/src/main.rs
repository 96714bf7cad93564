mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use efx_core::Error;

#[derive(Parser)]
#[command(
    name = "efx",
    version,
    about = "Construct and verify EFX allocations of indivisible goods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated or fixed instance.
    Gen(GenArgs),
    /// Compute an EFX allocation for an instance.
    Solve(SolveArgs),
    /// Report the EFX violations of an allocation.
    Check(CheckArgs),
    /// Report valuation classes and applicable constructions.
    Classify(ClassifyArgs),
    /// Run seeded trials and print one CSV row per trial.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Additive,
    MonotoneTable,
    Sized,
    Fixture,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated per-agent classes for `sized`: `arbitrary` or `k:l`.
    #[arg(long)]
    spec: Option<String>,
    /// Fixture name for `fixture`.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, default_value_t = 1)]
    min_weight: u64,
    #[arg(long, default_value_t = 100)]
    max_weight: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Auto,
    Trivial,
    ThmN1,
    ThmN2,
    Brute,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    algo: Algo,
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the iteration trace as JSON (two-free construction only).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the allocation as a single JSON line.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    allocation: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    ThmN1,
    ThmN2,
    OracleCross,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    max_n: usize,
    #[arg(long, default_value_t = 9)]
    max_m: usize,
    /// Check each instance against exhaustive search.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// How a command ends when it does not succeed.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Io(PathBuf, std::io::Error),
    /// Already reported; exit with this code.
    Exit(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

const EXIT_NONE_FOUND: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_MALFORMED: u8 = 65;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Malformed(_)
        | Error::Structural(_)
        | Error::Parse { .. }
        | Error::RangeOutOfBounds { .. } => EXIT_MALFORMED,
        Error::Capacity { .. } | Error::Precondition(_) | Error::Infeasible(_) => EXIT_PRECONDITION,
        Error::ProofMismatch { .. } | Error::Internal(_) => EXIT_MISMATCH,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Solve(a) => commands::solve(a),
        Command::Check(a) => commands::check(a),
        Command::Classify(a) => commands::classify(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Exit(code)) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(EXIT_MALFORMED)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
