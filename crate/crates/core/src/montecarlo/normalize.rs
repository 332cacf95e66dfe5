//! Centering and scaling of simulated detection times toward the Gumbel law.

use super::EmpiricalSummary;
use crate::error::{Error, Result};
use crate::model::{ScalingFamily, ThetaExample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `(T_1 - c1 M ln M) / (c1 M) - ln nu1`.
    T1(ScalingFamily),
    /// `(T_2 - c2 M ln M) / (c2 M) - ln nu2`.
    T2(ScalingFamily),
    /// Same transform as `T1`, applied to the total time.
    T(ScalingFamily),
    /// `(S_N - N ln N) / N` for `N` equally likely coupons.
    Uniform { n: u64 },
    /// `((1 - theta) S - N ln N) / N`.
    Theta(ThetaExample),
}

fn affine(samples: &[u64], center: f64, scale: f64, shift: f64) -> Vec<f64> {
    samples.iter().map(|&x| (x as f64 - center) / scale - shift).collect()
}

fn shape_error(expected: &[u64], found: &[u64]) -> Error {
    Error::Domain(format!("normalization expects group counts {expected:?}, simulated {found:?}"))
}

/// Normalized retained samples; fails if the needed samples were not kept or
/// the simulated mixture has the wrong shape.
pub fn normalized_samples(summary: &EmpiricalSummary, which: Normalization) -> Result<Vec<f64>> {
    let samples = summary
        .samples
        .as_ref()
        .ok_or_else(|| Error::Domain("no samples were retained".into()))?;
    let counts = &summary.group_counts;
    let group = |j: usize| -> Result<&[u64]> {
        samples
            .groups
            .get(j)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Domain("per-group samples need retention of all detection times".into()))
    };
    match which {
        Normalization::T1(f) | Normalization::T2(f) | Normalization::T(f) => {
            let expected = [f.m1(), f.m2()];
            if counts[..] != expected {
                return Err(shape_error(&expected, counts));
            }
            let mf = f.m as f64;
            let (data, c, nu) = match which {
                Normalization::T1(_) => (group(0)?, f.c1(), f.nu1),
                Normalization::T2(_) => (group(1)?, f.c2(), f.nu2),
                _ => (samples.total.as_slice(), f.c1(), f.nu1),
            };
            Ok(affine(data, c * mf * mf.ln(), c * mf, (nu as f64).ln()))
        }
        Normalization::Uniform { n } => {
            if counts[..] != [n] {
                return Err(shape_error(&[n], counts));
            }
            let nf = n as f64;
            Ok(affine(&samples.total, nf * nf.ln(), nf, 0.0))
        }
        Normalization::Theta(x) => {
            if counts[..] != [1, x.n] {
                return Err(shape_error(&[1, x.n], counts));
            }
            let nf = x.n as f64;
            let a = 1.0 - x.theta;
            Ok(affine(&samples.total, nf * nf.ln() / a, nf / a, 0.0))
        }
    }
}
