use std::path::PathBuf;

use clap::Args;
use coupon_mixture::{Error, GroupMixture, MixtureConfig, Result, ScalingFamily};

/// Where the mixture comes from: exactly one of the three sources.
#[derive(Debug, Args)]
pub struct MixtureArgs {
    /// JSON file with {"groups": [{"count": 3, "prob": "1/6"}, ...]} or
    /// {"scaling": {"nu1": 1, "nu2": 1, "lambda": 2, "M": 10}}
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Inline groups, `count:prob[,count:prob...]`, e.g. "2:1/4,1:1/2"
    #[arg(long, value_name = "SPEC")]
    pub groups: Option<String>,

    /// Two-group scaling family `nu1,nu2,lambda,M`
    #[arg(long, value_name = "NU1,NU2,LAMBDA,M")]
    pub scaling: Option<String>,

    /// Reverse the group order (for two groups: lambda -> 1/lambda)
    #[arg(long)]
    pub swap_groups: bool,
}

pub struct Source {
    pub mixture: GroupMixture,
    /// Present when the input was a scaling family or a two-group mixture.
    pub scaling: Option<ScalingFamily>,
}

impl MixtureArgs {
    pub fn resolve(&self) -> Result<Source> {
        let given = [self.config.is_some(), self.groups.is_some(), self.scaling.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::Parse("give exactly one of --config, --groups, --scaling".into()));
        }
        let config = if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
            MixtureConfig::from_json(&text)?
        } else if let Some(groups) = &self.groups {
            MixtureConfig::Groups(groups.parse()?)
        } else {
            MixtureConfig::Scaling(self.scaling.as_deref().unwrap_or_default().parse()?)
        };
        let mut mixture = config.mixture()?;
        let mut scaling = config.scaling().ok();
        if self.swap_groups {
            mixture = mixture.reversed();
            scaling = scaling.map(ScalingFamily::swapped);
        }
        Ok(Source { mixture, scaling })
    }
}

/// Trial counts such as `100000` or `1e6`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("expected a positive whole number, got {s:?}")),
    }
}

/// Requested workers, capped by `COUPON_MIXTURE_THREADS` when set.
pub fn worker_count(requested: usize) -> usize {
    let cap = std::env::var("COUPON_MIXTURE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&c| c > 0);
    match cap {
        Some(c) => requested.min(c),
        None => requested,
    }
}

/// Simulation flags shared by the subcommands that can run the simulator.
#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Number of simulated trials
    #[arg(long, default_value = "100000", value_parser = parse_count)]
    pub trials: u64,

    /// Seed for the trial streams
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (output does not depend on this)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("0.5").is_err());
        assert!(parse_count("-3").is_err());
    }
}
