//! Large-`N` and large-`M` approximations.

mod scaling;
mod series;

pub use scaling::{
    mean_t1_asymptotic, mean_t2_asymptotic, mean_t_asymptotic, moment_r_leading, p_first_asymptotic,
    second_rising_t1_asymptotic, second_rising_t2_asymptotic, second_rising_t_asymptotic, var_t1_asymptotic,
    var_t2_asymptotic, var_t_asymptotic, MeanDetail, Prediction, VarDetail, Which,
};
pub use series::{
    basel_tail_asymptotic, bernoulli_numbers, gamma_derivative_at_one, gamma_derivative_quadrature,
    gamma_derivative_table, gen_binomial, harmonic_asymptotic, uniform_rising_moment_series, SeriesExpansion,
    SeriesTerm, BERNOULLI_MAX, RISING_SERIES_MAX_ORDER,
};
