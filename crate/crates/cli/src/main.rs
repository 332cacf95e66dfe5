//! `coupon-mixture`: detection order and detection times for coupon
//! collecting from a mixture of uniform groups.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical refusal, 4 runtime or
//! I/O failure.

mod convergence;
mod input;
mod moments;
mod prob_first;
mod simulate;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coupon_mixture::ErrorKind;

#[derive(Debug, Parser)]
#[command(name = "coupon-mixture", version, about = "Coupon collecting from a mixture of uniform groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    ProbFirst(prob_first::ProbFirstArgs),
    Moments(moments::MomentsArgs),
    Convergence(convergence::ConvergenceArgs),
    Simulate(simulate::SimulateArgs),
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Numerical => 3,
        ErrorKind::Runtime => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::ProbFirst(a) => prob_first::run(a, &mut out),
        Command::Moments(a) => moments::run(a, &mut out),
        Command::Convergence(a) => convergence::run(a, &mut out),
        Command::Simulate(a) => simulate::run(a, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
