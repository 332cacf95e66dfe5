use std::io::Write;

use clap::{Args, ValueEnum};
use coupon_mixture::asymptotics::{mean_t_asymptotic, p_first_asymptotic, var_t_asymptotic};
use coupon_mixture::exact::{p_t1_before_t2_integral, IntegralForm};
use coupon_mixture::model::mixture_from_scaling;
use coupon_mixture::montecarlo::{estimate, normalized_samples, Normalization, Retain, SimConfig};
use coupon_mixture::quadrature::QuadratureSettings;
use coupon_mixture::scalar::format_real;
use coupon_mixture::stats::{ks_statistic, GumbelStandard};
use coupon_mixture::{Error, Result, ScalingFamily};

use crate::input::{parse_count, worker_count};
use crate::prob_first::csv_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Study {
    /// P{T1 < T2} (integral route) against nu2 Gamma(lambda+1) / (nu1^lambda M^(lambda-1)).
    /// Columns: M,exact,asymptotic,ratio
    Thm2,
    /// Simulated E[T] against c1 M H_{nu1 M}. Columns: M,mc_mean,mc_se,asymptotic,ratio
    Thm6,
    /// Simulated V[T] against pi^2 c1^2 M^2 / 6. Columns: M,mc_variance,mc_variance_se,asymptotic,ratio
    Cor4,
    /// KS distance of normalized T from the standard Gumbel law.
    /// Columns: M,samples,ks_d,critical_05,pass
    Gumbel,
}

/// Exact or simulated values against large-M predictions over a grid of M,
/// for the two-group family M1 = nu1 M, M2 = nu2 M, p2/p1 = lambda > 1.
#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub study: Study,

    /// lambda = p2/p1; must exceed 1 (label the groups so that group 2 is the likelier one)
    #[arg(long)]
    pub lambda: f64,

    #[arg(long, default_value_t = 1)]
    pub nu1: u64,

    #[arg(long, default_value_t = 1)]
    pub nu2: u64,

    /// Comma-separated values of M
    #[arg(long = "M-grid", value_delimiter = ',', required = true)]
    pub m_grid: Vec<u64>,

    /// Trials per M for thm6 and cor4
    #[arg(long, default_value = "100000", value_parser = parse_count)]
    pub trials: u64,

    /// Samples per M for gumbel
    #[arg(long, default_value = "10000", value_parser = parse_count)]
    pub samples: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
}

fn header(study: Study) -> &'static [&'static str] {
    match study {
        Study::Thm2 => &["M", "exact", "asymptotic", "ratio"],
        Study::Thm6 => &["M", "mc_mean", "mc_se", "asymptotic", "ratio"],
        Study::Cor4 => &["M", "mc_variance", "mc_variance_se", "asymptotic", "ratio"],
        Study::Gumbel => &["M", "samples", "ks_d", "critical_05", "pass"],
    }
}

pub fn run(args: &ConvergenceArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.lambda > 1.0) {
        return Err(Error::LambdaNotAboveOne { lambda: args.lambda });
    }
    let base = ScalingFamily::new(args.nu1, args.nu2, args.lambda, 1)?;
    let sim = |trials: u64, retain: Retain| SimConfig {
        seed: args.seed,
        trials,
        workers: worker_count(args.workers as usize),
        retain,
        ..Default::default()
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(args.study)).map_err(csv_error)?;
    for &m in &args.m_grid {
        if m == 0 {
            return Err(Error::InvalidScaling("M must be positive".into()));
        }
        let f = base.with_m(m);
        let mixture = mixture_from_scaling(&f)?;
        let record: Vec<String> = match args.study {
            Study::Thm2 => {
                let exact = p_t1_before_t2_integral(&mixture, IntegralForm::Root, &QuadratureSettings::default())?.value;
                let pred = p_first_asymptotic(&f)?;
                vec![format_real(exact), format_real(pred), format_real(exact / pred)]
            }
            Study::Thm6 => {
                let s = estimate(&mixture, &sim(args.trials, Retain::None))?;
                let pred = mean_t_asymptotic(&f)?.value;
                vec![
                    format_real(s.total.mean),
                    format_real(s.total.mean_se),
                    format_real(pred),
                    format_real(s.total.mean / pred),
                ]
            }
            Study::Cor4 => {
                let s = estimate(&mixture, &sim(args.trials, Retain::None))?;
                let pred = var_t_asymptotic(&f)?;
                vec![
                    format_real(s.total.variance),
                    format_real(s.total.variance_se),
                    format_real(pred),
                    format_real(s.total.variance / pred),
                ]
            }
            Study::Gumbel => {
                let s = estimate(&mixture, &sim(args.samples, Retain::Total))?;
                let ks = ks_statistic(&normalized_samples(&s, Normalization::T(f))?, &GumbelStandard)?;
                vec![
                    args.samples.to_string(),
                    format_real(ks.d),
                    format_real(ks.critical_05),
                    ks.passes_05().to_string(),
                ]
            }
        };
        let mut row = vec![m.to_string()];
        row.extend(record);
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
