//! Large-`M` predictions for the two-group scaling family.
//!
//! Throughout, `c1 = nu1 + lambda nu2` scales group 1 and the total time and
//! `c2 = nu1/lambda + nu2` scales group 2.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{basel_partial, harmonic};
use crate::model::ScalingFamily;
use crate::special::{gamma, EULER_GAMMA, ZETA2};

/// Which detection time a prediction refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    T1,
    T2,
    T,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::T1 => "T1",
            Which::T2 => "T2",
            Which::T => "T",
        })
    }
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T1" | "t1" => Ok(Which::T1),
            "T2" | "t2" => Ok(Which::T2),
            "T" | "t" => Ok(Which::T),
            _ => Err(Error::Parse(format!("unknown detection time {s:?} (T1|T2|T)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanDetail {
    /// `c M H_{nu M}`.
    Harmonic,
    /// `c M ln M + c (gamma + ln nu) M + c / (2 nu)`.
    Expanded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarDetail {
    Full,
    Leading,
}

/// A prediction with an alternative form and a label for its error order.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub alternative: Option<f64>,
    pub error_order: String,
}

fn require_lambda_above_one(f: &ScalingFamily) -> Result<()> {
    if f.lambda > 1.0 {
        Ok(())
    } else {
        Err(Error::LambdaNotAboveOne { lambda: f.lambda })
    }
}

/// `P{T_1 < T_2} ~ nu2 Gamma(lambda + 1) / (nu1^lambda M^(lambda - 1))`.
pub fn p_first_asymptotic(f: &ScalingFamily) -> Result<f64> {
    require_lambda_above_one(f)?;
    let (nu1, nu2, m) = (f.nu1 as f64, f.nu2 as f64, f.m as f64);
    Ok(nu2 * gamma(f.lambda + 1.0) * (-f.lambda * nu1.ln() - (f.lambda - 1.0) * m.ln()).exp())
}

fn mean_group(c: f64, nu: u64, m: u64, detail: MeanDetail) -> f64 {
    let mf = m as f64;
    match detail {
        MeanDetail::Harmonic => c * mf * harmonic(nu * m),
        MeanDetail::Expanded => expanded_mean(c, nu, m, true),
    }
}

fn expanded_mean(c: f64, nu: u64, m: u64, with_constant: bool) -> f64 {
    let (mf, nuf) = (m as f64, nu as f64);
    let constant = if with_constant { c / (2.0 * nuf) } else { 0.0 };
    c * mf * mf.ln() + c * (EULER_GAMMA + nuf.ln()) * mf + constant
}

/// `E[T_1]`.
pub fn mean_t1_asymptotic(f: &ScalingFamily, detail: MeanDetail) -> f64 {
    mean_group(f.c1(), f.nu1, f.m, detail)
}

/// `E[T_2]`.
pub fn mean_t2_asymptotic(f: &ScalingFamily, detail: MeanDetail) -> f64 {
    mean_group(f.c2(), f.nu2, f.m, detail)
}

/// `E[T] ~ c1 M H_{nu1 M}`, the expected time of the slower group.
///
/// The alternative is the expansion in `ln M`; its constant `c1 / (2 nu1)` is
/// only meaningful for `lambda > 2`, where the error is `o(1)`.
pub fn mean_t_asymptotic(f: &ScalingFamily) -> Result<Prediction> {
    require_lambda_above_one(f)?;
    let value = mean_t1_asymptotic(f, MeanDetail::Harmonic);
    let alternative = expanded_mean(f.c1(), f.nu1, f.m, f.lambda > 2.0);
    let error_order = if f.lambda > 2.0 {
        "o(1)".to_string()
    } else if f.lambda == 2.0 {
        "O(ln M)".to_string()
    } else {
        format!("O(M^{} ln M)", crate::scalar::format_real(2.0 - f.lambda))
    };
    Ok(Prediction { value, alternative: Some(alternative), error_order })
}

fn var_group(c: f64, nu: u64, m: u64, detail: VarDetail) -> f64 {
    let mf = m as f64;
    match detail {
        VarDetail::Full => c * c * basel_partial(nu * m) * mf * mf - c * mf * harmonic(nu * m),
        VarDetail::Leading => ZETA2 * c * c * mf * mf,
    }
}

/// `V[T_1]`.
pub fn var_t1_asymptotic(f: &ScalingFamily, detail: VarDetail) -> f64 {
    var_group(f.c1(), f.nu1, f.m, detail)
}

/// `V[T_2]`.
pub fn var_t2_asymptotic(f: &ScalingFamily, detail: VarDetail) -> f64 {
    var_group(f.c2(), f.nu2, f.m, detail)
}

/// `V[T] ~ pi^2 c1^2 M^2 / 6`.
pub fn var_t_asymptotic(f: &ScalingFamily) -> Result<f64> {
    require_lambda_above_one(f)?;
    Ok(var_t1_asymptotic(f, VarDetail::Leading))
}

fn second_rising_group(c: f64, nu: u64, m: u64) -> f64 {
    let mf = m as f64;
    let h = harmonic(nu * m);
    c * c * mf * mf * (h * h + basel_partial(nu * m))
}

/// `E[T_1 (T_1 + 1)] ~ c1^2 M^2 (H_{nu1 M}^2 + sum_{j<=nu1 M} 1/j^2)`.
pub fn second_rising_t1_asymptotic(f: &ScalingFamily) -> f64 {
    second_rising_group(f.c1(), f.nu1, f.m)
}

/// `E[T_2 (T_2 + 1)]`.
pub fn second_rising_t2_asymptotic(f: &ScalingFamily) -> f64 {
    second_rising_group(f.c2(), f.nu2, f.m)
}

/// `E[T (T + 1)]`, same form as for `T_1`, error `O(M^(3 - lambda + eps))`.
pub fn second_rising_t_asymptotic(f: &ScalingFamily) -> Result<Prediction> {
    require_lambda_above_one(f)?;
    let mf = f.m as f64;
    let c = f.c1();
    Ok(Prediction {
        value: second_rising_t1_asymptotic(f),
        alternative: Some(c * c * mf * mf * mf.ln().powi(2)),
        error_order: format!("O(M^{}+eps)", crate::scalar::format_real(3.0 - f.lambda)),
    })
}

/// Leading order `c^r M^r ln^r M` of `E[X^r]`.
pub fn moment_r_leading(f: &ScalingFamily, r: f64, which: Which) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("moment order r must be positive, got {r}")));
    }
    let c = match which {
        Which::T1 => f.c1(),
        Which::T2 => f.c2(),
        Which::T => {
            require_lambda_above_one(f)?;
            f.c1()
        }
    };
    let mf = f.m as f64;
    Ok((c * mf * mf.ln()).powf(r))
}
