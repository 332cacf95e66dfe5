use std::io::Write;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use coupon_mixture::exact::{
    first_detection_prob_dp, first_detection_prob_sum, p_t1_before_t2_integral, EvalMode, IntegralForm,
};
use coupon_mixture::montecarlo::{estimate, SimConfig};
use coupon_mixture::quadrature::QuadratureSettings;
use coupon_mixture::scalar::format_real;
use coupon_mixture::{Error, ErrorKind, GroupMixture, Result, Scalar};

use crate::input::{worker_count, MixtureArgs, SimArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sum,
    Dp,
    Integral(IntegralForm),
    Mc,
    All,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sum" => Ok(Method::Sum),
            "dp" => Ok(Method::Dp),
            "mc" => Ok(Method::Mc),
            "all" => Ok(Method::All),
            "integral" => Ok(Method::Integral(IntegralForm::Root)),
            _ => match s.strip_prefix("integral:") {
                Some(form) => form.parse().map(Method::Integral).map_err(|e: Error| e.to_string()),
                None => Err(format!("unknown method {s:?} (sum|dp|integral:FORM|mc|all)")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rational,
    Float,
    Auto,
}

impl From<Mode> for EvalMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Rational => EvalMode::Rational,
            Mode::Float => EvalMode::CompensatedFloat,
            Mode::Auto => EvalMode::Auto,
        }
    }
}

/// Probability that group l is the first to be completed.
///
/// A single method prints the value alone (`num/den` when exact). `--method
/// all` prints CSV with columns route,value,abs_delta_vs_dp,tolerance.
#[derive(Debug, Args)]
pub struct ProbFirstArgs {
    #[command(flatten)]
    pub mixture: MixtureArgs,

    /// Group number, starting at 1
    #[arg(long, default_value_t = 1)]
    pub group: usize,

    /// sum | dp | integral:FORM (FORM = stieltjes|power|root|exponential) | mc | all
    #[arg(long, default_value = "sum", value_parser = clap::value_parser!(Method))]
    pub method: Method,

    /// Evaluation of the alternating sum
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,

    #[command(flatten)]
    pub sim: SimArgs,
}

struct Row {
    route: String,
    value: Scalar,
    tolerance: f64,
}

fn integral(m: &GroupMixture, l: usize, form: IntegralForm) -> Result<Row> {
    let est = p_t1_before_t2_integral(m, form, &QuadratureSettings::default())?;
    let value = if l == 0 { est.value } else { 1.0 - est.value };
    Ok(Row { route: format!("integral:{form}"), value: Scalar::Float(value), tolerance: est.error })
}

fn sum(m: &GroupMixture, l: usize, mode: Mode) -> Result<Row> {
    let r = first_detection_prob_sum(m, l, mode.into())?;
    let tolerance = r.relative_error_estimate().map_or(0.0, |e| e * r.to_f64().abs());
    Ok(Row { route: "sum".into(), value: r.value, tolerance })
}

fn dp(m: &GroupMixture, l: usize) -> Result<Row> {
    Ok(Row { route: "dp".into(), value: first_detection_prob_dp(m, l)?, tolerance: 0.0 })
}

fn mc(m: &GroupMixture, l: usize, sim: &SimArgs) -> Result<Row> {
    let cfg = SimConfig {
        seed: sim.seed,
        trials: sim.trials,
        workers: worker_count(sim.workers as usize),
        ..Default::default()
    };
    let s = estimate(m, &cfg)?;
    Ok(Row { route: "mc".into(), value: Scalar::Float(s.first_freq[l]), tolerance: 4.0 * s.first_freq_se[l] })
}

pub fn run(args: &ProbFirstArgs, out: &mut dyn Write) -> Result<()> {
    let src = args.mixture.resolve()?;
    let m = &src.mixture;
    if args.group == 0 {
        return Err(Error::GroupIndex { index: 0, groups: m.len() });
    }
    let l = args.group - 1;
    m.check_group(l).map_err(|_| Error::GroupIndex { index: args.group, groups: m.len() })?;
    let row = match args.method {
        Method::Sum => sum(m, l, args.mode)?,
        Method::Dp => dp(m, l)?,
        Method::Integral(form) => integral(m, l, form)?,
        Method::Mc => mc(m, l, &args.sim)?,
        Method::All => return run_all(m, l, args, out),
    };
    writeln!(out, "{}", row.value)?;
    Ok(())
}

fn run_all(m: &GroupMixture, l: usize, args: &ProbFirstArgs, out: &mut dyn Write) -> Result<()> {
    let mut rows = vec![("sum".to_string(), sum(m, l, args.mode)), ("dp".to_string(), dp(m, l))];
    if m.len() == 2 {
        rows.extend(IntegralForm::ALL.iter().map(|&f| (format!("integral:{f}"), integral(m, l, f))));
    }
    rows.push(("mc".to_string(), mc(m, l, &args.sim)));
    let reference = rows[1].1.as_ref().ok().map(|r| r.value.to_f64());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["route", "value", "abs_delta_vs_dp", "tolerance"]).map_err(csv_error)?;
    for (route, row) in rows {
        let record = match row {
            Ok(r) => {
                let delta = reference.map_or("NA".to_string(), |d| format_real((r.value.to_f64() - d).abs()));
                [r.route, r.value.to_string(), delta, format_real(r.tolerance)]
            }
            // a route that refuses (size or conditioning) is reported, not fatal
            Err(e) if e.kind() != ErrorKind::Config => [route, "NA".into(), "NA".into(), e.to_string()],
            Err(e) => return Err(e),
        };
        w.write_record(record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Simulation(format!("CSV output: {other:?}")),
    }
}
