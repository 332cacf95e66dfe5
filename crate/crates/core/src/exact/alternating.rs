//! `P{T_l = T_min}` as a g-fold alternating binomial sum.
//!
//! ```text
//! P{T_l = T_min} = (-1)^g  sum_{k_j = 1..M_j}  (-1)^(k_1+..+k_g)
//!                  C(M_1,k_1)..C(M_g,k_g) * k_l p_l / (k_1 p_1 + .. + k_g p_g)
//! ```
//!
//! The terms grow like `prod C(M_j, k_j)` while the result is at most one, so
//! the float evaluation loses roughly `log10(sum |term|)` digits. Rational
//! mode clears denominators (`p_j = a_j / D`) so each term is an integer
//! over the integer `s = sum k_j a_j`, and sums the integer coefficients
//! per distinct `s` before forming any fraction.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::integral::{p_t1_before_t2_integral, IntegralForm};
use super::lattice::{dp_bytes, first_detection_prob_dp_with, DpOptions};
use super::{EvalMode, FirstDetection, Route};
use crate::error::{Error, Result};
use crate::model::GroupMixture;
use crate::quadrature::QuadratureSettings;
use crate::scalar::Scalar;
use crate::special::ln_binomial;

/// Auto mode uses rational arithmetic up to this many terms.
pub const AUTO_RATIONAL_TERM_LIMIT: u128 = 10_000_000;
/// Hard limit for an explicit rational request.
pub const RATIONAL_TERM_LIMIT: u128 = 100_000_000;
pub const FLOAT_TERM_LIMIT: u128 = 2_000_000_000;
/// Auto mode refuses a float sum whose estimated relative error exceeds this.
pub const CANCELLATION_THRESHOLD: f64 = 1e-6;

/// Number of terms `prod_j M_j`, saturating.
pub fn term_count(m: &GroupMixture) -> u128 {
    m.groups()
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.count as u128))
}

/// First-detection probability of group `l` (zero-based) by the alternating sum.
pub fn first_detection_prob_sum(m: &GroupMixture, l: usize, mode: EvalMode) -> Result<FirstDetection> {
    m.check_group(l)?;
    if m.len() == 1 {
        return Ok(FirstDetection { value: Scalar::exact(1, 1), route: Route::SumRational, condition: None });
    }
    let terms = term_count(m);
    match mode {
        EvalMode::Rational => {
            if !m.is_exact() {
                return Err(Error::NotRational);
            }
            if terms > RATIONAL_TERM_LIMIT {
                return Err(Error::TooManyTerms { what: "rational alternating sum", needed: terms, limit: RATIONAL_TERM_LIMIT });
            }
            Ok(FirstDetection { value: Scalar::Exact(sum_rational(m, l)), route: Route::SumRational, condition: None })
        }
        EvalMode::CompensatedFloat => {
            if terms > FLOAT_TERM_LIMIT {
                return Err(Error::TooManyTerms { what: "float alternating sum", needed: terms, limit: FLOAT_TERM_LIMIT });
            }
            let (value, condition) = sum_float(m, l);
            Ok(FirstDetection { value: Scalar::Float(value), route: Route::SumFloat, condition: Some(condition) })
        }
        EvalMode::Auto => auto(m, l, terms),
    }
}

fn auto(m: &GroupMixture, l: usize, terms: u128) -> Result<FirstDetection> {
    if m.is_exact() && terms <= AUTO_RATIONAL_TERM_LIMIT {
        return first_detection_prob_sum(m, l, EvalMode::Rational);
    }
    let mut estimate = f64::INFINITY;
    if terms <= FLOAT_TERM_LIMIT {
        let float = first_detection_prob_sum(m, l, EvalMode::CompensatedFloat)?;
        estimate = float.relative_error_estimate().unwrap_or(0.0);
        if estimate <= CANCELLATION_THRESHOLD {
            return Ok(float);
        }
    }
    if m.len() == 2 {
        let form = IntegralForm::Root;
        let est = p_t1_before_t2_integral(m, form, &QuadratureSettings::default())?;
        let value = if l == 0 { est.value } else { 1.0 - est.value };
        return Ok(FirstDetection { value: Scalar::Float(value), route: Route::Integral(form), condition: None });
    }
    let opts = DpOptions { exact: false, ..DpOptions::default() };
    if dp_bytes(m, false) <= opts.budget_bytes {
        let value = first_detection_prob_dp_with(m, l, &opts)?;
        return Ok(FirstDetection { value, route: Route::Lattice, condition: None });
    }
    Err(Error::Cancellation { estimate, threshold: CANCELLATION_THRESHOLD })
}

/// Visits every `k` with `1 <= k_j <= M_j`, last index fastest.
fn for_each_index<F: FnMut(&[u64])>(counts: &[u64], mut visit: F) {
    let g = counts.len();
    let mut k = vec![1u64; g];
    loop {
        visit(&k);
        let mut j = g;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            if k[j] < counts[j] {
                k[j] += 1;
                break;
            }
            k[j] = 1;
        }
    }
}

fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 1..=n {
        c = c * BigInt::from(n - k + 1) / BigInt::from(k);
        row.push(c.clone());
    }
    row
}

fn sum_rational(m: &GroupMixture, l: usize) -> BigRational {
    let probs = m.probs_exact().expect("checked exact");
    let counts = m.counts();
    let g = counts.len();
    let common = probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let scaled: Vec<BigInt> = probs
        .iter()
        .map(|p| (p * BigRational::from_integer(common.clone())).to_integer())
        .collect();
    let binomials: Vec<Vec<BigInt>> = counts.iter().map(|&c| binomial_row(c)).collect();

    // coefficient of 1/s, keyed by s = sum k_j a_j
    let mut by_denominator: HashMap<BigInt, BigInt> = HashMap::new();
    for_each_index(&counts, |k| {
        let mut s = BigInt::zero();
        let mut weight = BigInt::one();
        for j in 0..g {
            s += &scaled[j] * BigInt::from(k[j]);
            weight *= &binomials[j][k[j] as usize];
        }
        weight *= &scaled[l] * BigInt::from(k[l]);
        let parity = (g as u64 + k.iter().sum::<u64>()) % 2;
        let entry = by_denominator.entry(s).or_default();
        if parity == 0 {
            *entry += weight;
        } else {
            *entry -= weight;
        }
    });
    let mut fractions: Vec<BigRational> = by_denominator
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(s, c)| BigRational::new(c, s))
        .collect();
    fractions.sort_by(|a, b| a.denom().cmp(b.denom()));
    tree_sum(fractions)
}

fn tree_sum(mut items: Vec<BigRational>) -> BigRational {
    if items.is_empty() {
        return BigRational::zero();
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        items = next;
    }
    items.pop().expect("non-empty")
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn sum_float(m: &GroupMixture, l: usize) -> (f64, f64) {
    let counts = m.counts();
    let probs = m.probs_f64();
    let g = counts.len();
    let ln_binomials: Vec<Vec<f64>> = counts
        .iter()
        .map(|&c| (0..=c).map(|k| ln_binomial(c, k)).collect())
        .collect();
    let mut total = CompensatedSum::default();
    let mut magnitude = 0.0f64;
    for_each_index(&counts, |k| {
        let mut ln_term = 0.0;
        let mut rate = 0.0;
        for j in 0..g {
            ln_term += ln_binomials[j][k[j] as usize];
            rate += k[j] as f64 * probs[j];
        }
        ln_term += (k[l] as f64 * probs[l]).ln() - rate.ln();
        let term = ln_term.exp();
        magnitude += term;
        let parity = (g as u64 + k.iter().sum::<u64>()) % 2;
        total.add(if parity == 0 { term } else { -term });
    });
    let value = total.value();
    let condition = if value != 0.0 { magnitude / value.abs() } else { f64::INFINITY };
    (value, condition)
}
