use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Broad failure categories, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The inputs are malformed or outside an operation's domain.
    Config,
    /// The computation was refused because its result could not be trusted.
    Numerical,
    /// Resource exhaustion or I/O.
    Runtime,
}

/// Which mixture invariant failed.
#[derive(Debug, Clone, PartialEq)]
pub enum MixtureViolation {
    NoGroups,
    ZeroCount { group: usize },
    NonPositiveProbability { group: usize, value: f64 },
    /// `sum_j M_j p_j - 1` is not zero (exactly, or within tolerance in float mode).
    NotNormalized { residual: Scalar },
}

impl fmt::Display for MixtureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixtureViolation::NoGroups => write!(f, "mixture has no groups"),
            MixtureViolation::ZeroCount { group } => {
                write!(f, "group {} has no coupons", group + 1)
            }
            MixtureViolation::NonPositiveProbability { group, value } => {
                write!(f, "group {} has non-positive probability {value}", group + 1)
            }
            MixtureViolation::NotNormalized { residual } => {
                write!(f, "sum of count*prob differs from 1 by {residual}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mixture: {0}")]
    InvalidMixture(MixtureViolation),

    #[error("invalid scaling family: {0}")]
    InvalidScaling(String),

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("lambda = p2/p1 must exceed 1 (got {lambda}); relabel the groups so the second is the more likely one")]
    LambdaNotAboveOne { lambda: f64 },

    #[error("group index {index} out of range for a mixture with {groups} groups")]
    GroupIndex { index: usize, groups: usize },

    #[error("exact rational evaluation requested but probabilities are floating point")]
    NotRational,

    #[error("{what} needs {needed} terms, limit is {limit}")]
    TooManyTerms { what: &'static str, needed: u128, limit: u128 },

    #[error("lattice needs {needed} bytes, budget is {budget}")]
    MemoryBudget { needed: u128, budget: u128 },

    #[error("alternating sum is ill-conditioned: estimated relative error {estimate:.3e} exceeds {threshold:.1e}")]
    Cancellation { estimate: f64, threshold: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {value}, error {error:.3e})")]
    Quadrature { subdivisions: usize, value: f64, error: f64 },

    #[error("trial exceeded {limit} draws without completing")]
    DrawLimit { limit: u64 },

    #[error("{0}")]
    Simulation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidMixture(_)
            | Error::InvalidScaling(_)
            | Error::Domain(_)
            | Error::LambdaNotAboveOne { .. }
            | Error::GroupIndex { .. }
            | Error::NotRational
            | Error::Parse(_) => ErrorKind::Config,
            Error::TooManyTerms { .. } | Error::Cancellation { .. } | Error::Quadrature { .. } => {
                ErrorKind::Numerical
            }
            Error::MemoryBudget { .. }
            | Error::DrawLimit { .. }
            | Error::Simulation(_)
            | Error::Io(_) => ErrorKind::Runtime,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
