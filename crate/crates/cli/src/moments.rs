use std::io::Write;

use clap::{Args, ValueEnum};
use coupon_mixture::asymptotics::{
    mean_t1_asymptotic, mean_t2_asymptotic, mean_t_asymptotic, moment_r_leading, second_rising_t1_asymptotic,
    second_rising_t2_asymptotic, second_rising_t_asymptotic, MeanDetail, Which,
};
use coupon_mixture::exact::{
    group_moment, group_moment_subset_sum, mixture_moment, rising_moment_subset_sum, RisingMomentQuery,
};
use coupon_mixture::montecarlo::{estimate, SimConfig};
use coupon_mixture::quadrature::QuadratureSettings;
use coupon_mixture::scalar::format_real;
use coupon_mixture::{Error, ErrorKind, GroupMixture, Result, ScalingFamily};

use crate::input::{worker_count, MixtureArgs, SimArgs, Source};
use crate::prob_first::csv_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Quadrature,
    Subset,
    Asymptotic,
    Mc,
    All,
}

/// Rising moment E[X^(r)] = E[Gamma(X + r) / Gamma(X)] of a detection time.
///
/// Prints CSV with columns method,which,r,value,uncertainty,note. T1 and T2
/// are the completion times of groups 1 and 2, T the total collection time.
#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub mixture: MixtureArgs,

    /// Moment order r > 0
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,

    /// T1 | T2 | T
    #[arg(long, default_value = "T", value_parser = clap::value_parser!(Which))]
    pub which: Which,

    #[arg(long, value_enum, default_value_t = Method::Quadrature)]
    pub method: Method,

    #[command(flatten)]
    pub sim: SimArgs,
}

struct Row {
    method: &'static str,
    value: f64,
    uncertainty: Option<f64>,
    note: String,
}

fn group_of(m: &GroupMixture, which: Which) -> Result<Option<usize>> {
    let j = match which {
        Which::T => return Ok(None),
        Which::T1 => 0,
        Which::T2 => 1,
    };
    m.check_group(j).map_err(|_| Error::GroupIndex { index: j + 1, groups: m.len() })?;
    Ok(Some(j))
}

fn quadrature(m: &GroupMixture, which: Which, r: f64) -> Result<Row> {
    let s = QuadratureSettings::default();
    let est = match group_of(m, which)? {
        None => mixture_moment(m, r, &s)?,
        Some(j) => group_moment(m, j, r, &s)?,
    };
    Ok(Row { method: "quadrature", value: est.value, uncertainty: Some(est.error), note: String::new() })
}

fn subset(m: &GroupMixture, which: Which, r: f64) -> Result<Row> {
    let v = match group_of(m, which)? {
        None => rising_moment_subset_sum(&RisingMomentQuery::from_mixture(m, r)?)?,
        Some(j) => group_moment_subset_sum(m, j, r)?,
    };
    let note = if v.is_exact() { format!("exact {v}") } else { String::new() };
    Ok(Row { method: "subset", value: v.to_f64(), uncertainty: Some(0.0), note })
}

fn asymptotic(f: Option<ScalingFamily>, which: Which, r: f64) -> Result<Row> {
    let f = f.ok_or_else(|| Error::Domain("asymptotic moments need a two-group scaling family".into()))?;
    let row = |value: f64, note: String| Row { method: "asymptotic", value, uncertainty: None, note };
    if r == 1.0 {
        return Ok(match which {
            Which::T1 => row(
                mean_t1_asymptotic(&f, MeanDetail::Harmonic),
                format!("expanded {}", format_real(mean_t1_asymptotic(&f, MeanDetail::Expanded))),
            ),
            Which::T2 => row(
                mean_t2_asymptotic(&f, MeanDetail::Harmonic),
                format!("expanded {}", format_real(mean_t2_asymptotic(&f, MeanDetail::Expanded))),
            ),
            Which::T => {
                let p = mean_t_asymptotic(&f)?;
                let alt = p.alternative.map(format_real).unwrap_or_default();
                row(p.value, format!("expanded {alt}; error {}", p.error_order))
            }
        });
    }
    if r == 2.0 {
        return Ok(match which {
            Which::T1 => row(second_rising_t1_asymptotic(&f), String::new()),
            Which::T2 => row(second_rising_t2_asymptotic(&f), String::new()),
            Which::T => {
                let p = second_rising_t_asymptotic(&f)?;
                row(p.value, format!("error {}", p.error_order))
            }
        });
    }
    Ok(row(moment_r_leading(&f, r, which)?, "leading order c^r M^r ln^r M".into()))
}

fn mc(m: &GroupMixture, which: Which, r: f64, sim: &SimArgs) -> Result<Row> {
    let j = group_of(m, which)?;
    let cfg = SimConfig {
        seed: sim.seed,
        trials: sim.trials,
        workers: worker_count(sim.workers as usize),
        rising_order: r,
        ..Default::default()
    };
    let s = estimate(m, &cfg)?;
    let e = match j {
        None => &s.total,
        Some(j) => &s.groups[j],
    };
    Ok(Row {
        method: "mc",
        value: e.rising_mean,
        uncertainty: Some(e.rising_se),
        note: format!("{} trials, seed {}", s.trials, s.seed),
    })
}

pub fn run(args: &MomentsArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.r > 0.0 && args.r.is_finite()) {
        return Err(Error::Domain(format!("moment order r must be positive, got {}", args.r)));
    }
    let Source { mixture: m, scaling } = args.mixture.resolve()?;
    let (which, r) = (args.which, args.r);
    let rows = match args.method {
        Method::Quadrature => vec![quadrature(&m, which, r)?],
        Method::Subset => vec![subset(&m, which, r)?],
        Method::Asymptotic => vec![asymptotic(scaling, which, r)?],
        Method::Mc => vec![mc(&m, which, r, &args.sim)?],
        Method::All => {
            let attempts = [
                ("quadrature", quadrature(&m, which, r)),
                ("subset", subset(&m, which, r)),
                ("asymptotic", asymptotic(scaling, which, r)),
                ("mc", mc(&m, which, r, &args.sim)),
            ];
            let mut rows = Vec::new();
            for (method, attempt) in attempts {
                match attempt {
                    Ok(row) => rows.push(row),
                    Err(e) if matches!(e, Error::GroupIndex { .. }) => return Err(e),
                    Err(e) if e.kind() != ErrorKind::Runtime => {
                        rows.push(Row { method, value: f64::NAN, uncertainty: None, note: e.to_string() })
                    }
                    Err(e) => return Err(e),
                }
            }
            rows
        }
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "which", "r", "value", "uncertainty", "note"]).map_err(csv_error)?;
    for row in rows {
        let value = if row.value.is_nan() { "NA".to_string() } else { format_real(row.value) };
        w.write_record([
            row.method.to_string(),
            which.to_string(),
            format_real(r),
            value,
            row.uncertainty.map(format_real).unwrap_or_default(),
            row.note,
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
