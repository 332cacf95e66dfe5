//! Standard Gumbel law and the one-sample Kolmogorov-Smirnov statistic.

use crate::error::{Error, Result};

/// A distribution function. `cdf_left(x)` is `P{X < x}`; it only differs from
/// `cdf` at atoms.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// `F(y) = exp(-e^(-y))`.
pub fn gumbel_cdf(y: f64) -> f64 {
    (-(-y).exp()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GumbelStandard;

impl Cdf for GumbelStandard {
    fn cdf(&self, x: f64) -> f64 {
        gumbel_cdf(x)
    }
}

/// Step function of a fixed sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        EmpiricalCdf { sorted }
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s < x) as f64 / self.sorted.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub d: f64,
    pub n: usize,
    /// Asymptotic 5% critical value `1.36 / sqrt(n)`.
    pub critical_05: f64,
}

impl KsResult {
    pub fn passes_05(&self) -> bool {
        self.d < self.critical_05
    }
}

/// `D = sup_x |ECDF(x) - F(x)|`.
///
/// The supremum is attained at a sample point, approached from the left or
/// the right; ties are handled by comparing both one-sided limits.
pub fn ks_statistic<C: Cdf + ?Sized>(samples: &[f64], cdf: &C) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::Domain("KS statistic needs at least one sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("KS statistic got a NaN sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < n {
        let x = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == x {
            j += 1;
        }
        let below = i as f64 / nf;
        let at = j as f64 / nf;
        d = d.max((at - cdf.cdf(x)).abs()).max((below - cdf.cdf_left(x)).abs());
        i = j;
    }
    Ok(KsResult { d, n, critical_05: 1.36 / nf.sqrt() })
}
