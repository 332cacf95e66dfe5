//! Truncated asymptotic series for harmonic-type sums and uniform rising moments.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Estimate, QuadratureSettings};
use crate::scalar::rational_to_f64;
use crate::special::{EULER_GAMMA, ZETA2, ZETA3};

pub const BERNOULLI_MAX: usize = 60;
/// Largest `n` accepted by [`uniform_rising_moment_series`].
pub const RISING_SERIES_MAX_ORDER: usize = 6;
const GAMMA_DERIVATIVE_MAX: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTerm {
    /// Value of the term at the evaluation point.
    pub value: f64,
    pub description: String,
}

/// A truncated asymptotic series evaluated at one value of its scale variable.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    pub scale: String,
    pub at: f64,
    pub truncation_order: usize,
    pub terms: Vec<SeriesTerm>,
    /// Magnitude of the first term left out; the usual error proxy.
    pub first_omitted: f64,
}

impl SeriesExpansion {
    /// Partial sum, smallest terms first.
    pub fn value(&self) -> f64 {
        let mut values: Vec<f64> = self.terms.iter().map(|t| t.value).collect();
        values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        values.into_iter().sum()
    }

    fn term(&mut self, value: f64, description: impl Into<String>) {
        self.terms.push(SeriesTerm { value, description: description.into() });
    }
}

/// `B_1, ..., B_{m_max}` from `sum_{k<=m} C(m+1, k) B_k = 0` (so `B_1 = -1/2`).
pub fn bernoulli_numbers(m_max: usize) -> Result<Vec<BigRational>> {
    if m_max > BERNOULLI_MAX {
        return Err(Error::Domain(format!("Bernoulli numbers limited to index {BERNOULLI_MAX}")));
    }
    let mut b = vec![BigRational::one()];
    for m in 1..=m_max {
        // binomial row C(m+1, k)
        let mut c = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(c.clone()) * bk;
            c = c * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b.remove(0);
    Ok(b)
}

fn even_bernoulli(count: usize) -> Result<Vec<f64>> {
    let b = bernoulli_numbers(2 * count)?;
    Ok((1..=count).map(|k| rational_to_f64(&b[2 * k - 1])).collect())
}

fn check_scale(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("asymptotic series need N >= 2, got {n}")));
    }
    Ok(())
}

/// `H_N ~ ln N + gamma + 1/(2N) - sum_{k<=order} B_{2k} / (2k N^{2k})`.
pub fn harmonic_asymptotic(n: u64, order: usize) -> Result<SeriesExpansion> {
    check_scale(n)?;
    let b = even_bernoulli(order + 1)?;
    let nf = n as f64;
    let mut s = SeriesExpansion { scale: "N".into(), at: nf, truncation_order: order, terms: vec![], first_omitted: 0.0 };
    s.term(nf.ln(), "ln N");
    s.term(EULER_GAMMA, "gamma");
    s.term(0.5 / nf, "1/(2N)");
    let term = |k: usize| -b[k - 1] / (2.0 * k as f64 * nf.powi(2 * k as i32));
    for k in 1..=order {
        s.term(term(k), format!("-B_{}/({}N^{})", 2 * k, 2 * k, 2 * k));
    }
    s.first_omitted = term(order + 1).abs();
    Ok(s)
}

/// `sum_{j<=N} 1/j^2 ~ pi^2/6 - 1/N + 1/(2N^2) - sum_{k<=order} B_{2k} / N^{2k+1}`.
pub fn basel_tail_asymptotic(n: u64, order: usize) -> Result<SeriesExpansion> {
    check_scale(n)?;
    let b = even_bernoulli(order + 1)?;
    let nf = n as f64;
    let mut s = SeriesExpansion { scale: "N".into(), at: nf, truncation_order: order, terms: vec![], first_omitted: 0.0 };
    s.term(ZETA2, "pi^2/6");
    s.term(-1.0 / nf, "-1/N");
    s.term(0.5 / (nf * nf), "1/(2N^2)");
    let term = |k: usize| -b[k - 1] / nf.powi(2 * k as i32 + 1);
    for k in 1..=order {
        s.term(term(k), format!("-B_{}/N^{}", 2 * k, 2 * k + 1));
    }
    s.first_omitted = term(order + 1).abs();
    Ok(s)
}

/// `r (r-1) ... (r-k+1) / k!`.
pub fn gen_binomial(r: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (r - i as f64) / (i + 1) as f64)
}

/// `Gamma^(k)(1)` for `k <= 3` in closed form.
pub fn gamma_derivative_table(k: usize) -> Option<f64> {
    let g = EULER_GAMMA;
    match k {
        0 => Some(1.0),
        1 => Some(-g),
        2 => Some(ZETA2 + g * g),
        3 => Some(-(2.0 * ZETA3 + PI * PI * g / 2.0 + g * g * g)),
        _ => None,
    }
}

/// `Gamma^(k)(1) = int_0^inf e^(-x) ln^k x dx` by quadrature.
///
/// With `x = e^(-u)` the integrand `e^(-u - e^(-u)) (-u)^k` is smooth and
/// negligible outside `[-6, 100]` for the supported `k`.
pub fn gamma_derivative_quadrature(k: usize, s: &QuadratureSettings) -> Result<Estimate> {
    if k > GAMMA_DERIVATIVE_MAX {
        return Err(Error::Domain(format!("Gamma derivatives limited to order {GAMMA_DERIVATIVE_MAX}")));
    }
    integrate(|u: f64| (-u - (-u).exp()).exp() * (-u).powi(k as i32), -6.0, 100.0, s)
}

/// `Gamma^(k)(1)`: table for `k <= 3`, quadrature beyond.
pub fn gamma_derivative_at_one(k: usize) -> Result<f64> {
    match gamma_derivative_table(k) {
        Some(v) => Ok(v),
        None => Ok(gamma_derivative_quadrature(k, &QuadratureSettings::default())?.value),
    }
}

/// `E[S_N^(r)] ~ N^r ln^r N sum_{k<=n} C(r, k) (-1)^k Gamma^(k)(1) / ln^k N` for `N` equally likely coupons.
pub fn uniform_rising_moment_series(n: u64, r: f64, order: usize) -> Result<SeriesExpansion> {
    check_scale(n)?;
    if order > RISING_SERIES_MAX_ORDER {
        return Err(Error::Domain(format!("series order limited to {RISING_SERIES_MAX_ORDER}, got {order}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("moment order r must be positive, got {r}")));
    }
    let nf = n as f64;
    let log_n = nf.ln();
    let lead = (r * (nf.ln() + log_n.ln())).exp();
    let term = |k: usize| -> Result<f64> {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(lead * gen_binomial(r, k as u32) * sign * gamma_derivative_at_one(k)? / log_n.powi(k as i32))
    };
    let mut s =
        SeriesExpansion { scale: "N".into(), at: nf, truncation_order: order, terms: vec![], first_omitted: 0.0 };
    for k in 0..=order {
        s.term(term(k)?, format!("C(r,{k}) (-1)^{k} Gamma^({k})(1) N^r ln^(r-{k}) N"));
    }
    s.first_omitted = term(order + 1)?.abs();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{basel_partial, harmonic};

    #[test]
    fn bernoulli_examples() {
        let b = bernoulli_numbers(12).unwrap();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(b[0], r(-1, 2));
        assert_eq!(b[1], r(1, 6));
        assert_eq!(b[2], r(0, 1));
        assert_eq!(b[3], r(-1, 30));
        assert_eq!(b[11], r(-691, 2730));
        let b = bernoulli_numbers(60).unwrap();
        assert!(b.iter().skip(2).step_by(2).all(Zero::is_zero));
        assert!(bernoulli_numbers(61).is_err());
    }

    #[test]
    fn harmonic_examples() {
        assert!((harmonic_asymptotic(10, 2).unwrap().value() - harmonic(10)).abs() < 1e-8);
        assert!((harmonic_asymptotic(100, 1).unwrap().value() - harmonic(100)).abs() < 1e-10);
        let coarse = harmonic_asymptotic(2, 0).unwrap();
        assert!((coarse.value() - 1.5).abs() <= 0.25);
        assert!(harmonic_asymptotic(1, 0).is_err());
    }

    #[test]
    fn harmonic_error_shrinks_while_terms_shrink() {
        for n in [10u64, 30, 100] {
            let exact = harmonic(n);
            for order in 0..4 {
                let a = harmonic_asymptotic(n, order).unwrap();
                let b = harmonic_asymptotic(n, order + 1).unwrap();
                assert!((b.value() - exact).abs() <= (a.value() - exact).abs() + 1e-15);
                assert!((a.value() - exact).abs() <= 2.0 * a.first_omitted + 1e-14);
            }
        }
    }

    #[test]
    fn basel_examples() {
        assert!((basel_tail_asymptotic(10, 1).unwrap().value() - basel_partial(10)).abs() < 1e-6);
        assert!((basel_tail_asymptotic(100, 1).unwrap().value() - basel_partial(100)).abs() < 1e-10);
        assert!((basel_tail_asymptotic(1_000_000, 0).unwrap().value() - ZETA2).abs() < 1e-5);
    }

    #[test]
    fn gen_binomial_examples() {
        assert_eq!(gen_binomial(2.0, 3), 0.0);
        assert_eq!(gen_binomial(0.5, 0), 1.0);
        assert_eq!(gen_binomial(0.5, 1), 0.5);
        assert_eq!(gen_binomial(0.5, 2), -0.125);
    }

    #[test]
    fn gamma_derivatives_table_matches_quadrature() {
        let s = QuadratureSettings::default();
        for k in 0..=3 {
            let q = gamma_derivative_quadrature(k, &s).unwrap().value;
            assert!((q - gamma_derivative_table(k).unwrap()).abs() < 1e-9, "k = {k}");
        }
        // Gamma''''(1) = gamma^4 + pi^2 gamma^2 + 8 gamma zeta(3) + 3 pi^4 / 20
        let g = EULER_GAMMA;
        let fourth = g.powi(4) + PI * PI * g * g + 8.0 * g * ZETA3 + 3.0 * PI.powi(4) / 20.0;
        assert!((gamma_derivative_at_one(4).unwrap() - fourth).abs() < 1e-9);
    }

    #[test]
    fn rising_series_examples() {
        for n in [2u64, 10, 1000] {
            let nf = n as f64;
            let v = uniform_rising_moment_series(n, 1.0, 1).unwrap().value();
            assert!((v - nf * (nf.ln() + EULER_GAMMA)).abs() < 1e-10 * nf * nf.ln());
        }
        let v = uniform_rising_moment_series(500, 1.0, 1).unwrap().value();
        assert!((v / crate::exact::uniform_mean(500) - 1.0).abs() < 0.015);
        let v = uniform_rising_moment_series(200, 2.0, 2).unwrap().value();
        assert!((v / crate::exact::uniform_second_rising(200) - 1.0).abs() < 0.05);
        assert!(uniform_rising_moment_series(200, 2.0, 7).is_err());
    }
}
