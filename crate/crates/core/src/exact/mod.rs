//! Exact (non-asymptotic) first-detection probabilities and detection-time
//! moments.
//!
//! Every quantity has at least two independent routes: the alternating
//! binomial sum and the lattice recursion for first detection (plus four
//! integral representations when there are two groups), and the
//! Poissonized integral and the subset expansion for rising moments.

mod alternating;
mod integral;
mod lattice;
mod moments;
mod uniform;

pub use alternating::{
    first_detection_prob_sum, term_count, AUTO_RATIONAL_TERM_LIMIT, CANCELLATION_THRESHOLD, FLOAT_TERM_LIMIT,
    RATIONAL_TERM_LIMIT,
};
pub use integral::{p_t1_before_t2_integral, IntegralForm};
pub use lattice::{first_detection_prob_dp, first_detection_prob_dp_with, DpOptions, DEFAULT_MEMORY_BUDGET};
pub use moments::{
    group_moment, group_moment_subset_sum, mixture_moment, rising_moment, rising_moment_subset_sum,
    theta_mean_exact, RisingMomentQuery, SUBSET_SUM_MAX_COUPONS,
};
pub use uniform::{basel_partial, harmonic, harmonic_exact, uniform_mean, uniform_second_rising, HARMONIC_EXACT_MAX};

use crate::scalar::Scalar;

/// How the alternating sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Big-integer rational arithmetic; requires rational probabilities.
    Rational,
    /// Log-space terms with sign tracking and compensated summation.
    CompensatedFloat,
    /// Rational when possible, otherwise float, falling back to the
    /// integral or lattice routes when the float sum is ill-conditioned.
    #[default]
    Auto,
}

/// Which computation produced a first-detection probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    SumRational,
    SumFloat,
    Lattice,
    Integral(IntegralForm),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstDetection {
    pub value: Scalar,
    pub route: Route,
    /// `sum |term| / |result|` for float alternating sums.
    pub condition: Option<f64>,
}

impl FirstDetection {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Estimated relative rounding error of a float alternating sum.
    pub fn relative_error_estimate(&self) -> Option<f64> {
        self.condition.map(|c| c * f64::EPSILON)
    }
}
