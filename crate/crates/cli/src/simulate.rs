use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use coupon_mixture::montecarlo::{estimate, Retain, SimConfig};
use coupon_mixture::{Error, Result};

use crate::input::{worker_count, MixtureArgs, SimArgs};

/// Simulates the coupon process and prints the summary as JSON.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub mixture: MixtureArgs,

    #[command(flatten)]
    pub sim: SimArgs,

    /// Keep samples in memory: none | T | all (at most 10^6 values)
    #[arg(long, default_value = "none", value_parser = clap::value_parser!(Retain))]
    pub retain: Retain,

    /// Order r of the rising moment reported next to mean and variance
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,

    /// Write every simulated T to FILE, one value per line
    #[arg(long, value_name = "FILE")]
    pub dump: Option<PathBuf>,
}

pub fn run(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let src = args.mixture.resolve()?;
    let retain = match (args.retain, &args.dump) {
        (Retain::None, Some(_)) => Retain::Total,
        (r, _) => r,
    };
    let cfg = SimConfig {
        seed: args.sim.seed,
        trials: args.sim.trials,
        workers: worker_count(args.sim.workers as usize),
        retain,
        rising_order: args.r,
    };
    let summary = estimate(&src.mixture, &cfg)?;
    if let Some(path) = &args.dump {
        let samples = summary.samples.as_ref().ok_or_else(|| Error::Simulation("no samples retained".into()))?;
        let mut f = BufWriter::new(File::create(path)?);
        for t in &samples.total {
            writeln!(f, "{t}")?;
        }
        f.flush()?;
    }
    writeln!(out, "{}", summary.to_json())?;
    Ok(())
}
