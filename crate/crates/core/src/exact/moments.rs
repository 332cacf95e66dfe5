//! Rising moments `E[S^(r)] = E[Gamma(S + r) / Gamma(S)]` of collection times.
//!
//! Embedding the draws in a unit-rate Poisson process makes the arrival of
//! each coupon an independent exponential clock, which gives
//!
//! ```text
//! E[S^(r)] = r int_0^inf t^(r-1) [1 - prod_j (1 - e^(-q_j t))] dt
//!          = Gamma(r + 1) sum_{J nonempty} (-1)^(|J|-1) / (sum_{j in J} q_j)^r.
//! ```
//!
//! The same identities hold for the time to collect any subset of the
//! coupons (e.g. one group), using only that subset's factors.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::alternating::CompensatedSum;
use super::uniform::harmonic;
use crate::error::{Error, Result};
use crate::model::{GroupMixture, ThetaExample, FLOAT_NORMALIZATION_TOL};
use crate::quadrature::{integrate_semi_infinite, upper_incomplete_gamma_bound, Estimate, QuadratureSettings};
use crate::scalar::Scalar;
use crate::special::gamma;

/// The subset expansion has `2^N - 1` terms.
pub const SUBSET_SUM_MAX_COUPONS: usize = 25;

/// Per-coupon probabilities (summing to one) and a real order `r > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RisingMomentQuery {
    q: Vec<Scalar>,
    r: f64,
}

impl RisingMomentQuery {
    pub fn new(q: Vec<f64>, r: f64) -> Result<Self> {
        Self::from_scalars(q.into_iter().map(Scalar::Float).collect(), r)
    }

    /// Rational probabilities; enables exact subset sums for integer `r`.
    pub fn exact(q: Vec<BigRational>, r: f64) -> Result<Self> {
        Self::from_scalars(q.into_iter().map(Scalar::Exact).collect(), r)
    }

    pub fn from_scalars(q: Vec<Scalar>, r: f64) -> Result<Self> {
        check_order(r)?;
        if q.is_empty() {
            return Err(Error::Domain("need at least one coupon".into()));
        }
        if let Some(bad) = q.iter().find(|x| !x.is_positive()) {
            return Err(Error::Domain(format!("coupon probabilities must be positive, got {bad}")));
        }
        let exact: Option<Vec<&BigRational>> = q.iter().map(Scalar::as_exact).collect();
        let normalized = match exact {
            Some(qs) => qs.into_iter().fold(BigRational::zero(), |a, b| a + b).is_one(),
            None => (q.iter().map(Scalar::to_f64).sum::<f64>() - 1.0).abs() <= FLOAT_NORMALIZATION_TOL,
        };
        if !normalized {
            return Err(Error::Domain("coupon probabilities must sum to 1".into()));
        }
        Ok(RisingMomentQuery { q, r })
    }

    /// Expands a mixture to its per-coupon probabilities.
    pub fn from_mixture(m: &GroupMixture, r: f64) -> Result<Self> {
        let q = m
            .groups()
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.prob.clone(), g.count as usize))
            .collect();
        Self::from_scalars(q, r)
    }

    pub fn q(&self) -> &[Scalar] {
        &self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    fn grouped(&self) -> Vec<(f64, f64)> {
        let mut q: Vec<f64> = self.q.iter().map(Scalar::to_f64).collect();
        q.sort_by(f64::total_cmp);
        let mut groups: Vec<(f64, f64)> = Vec::new();
        for x in q {
            match groups.last_mut() {
                Some((count, prob)) if *prob == x => *count += 1.0,
                _ => groups.push((1.0, x)),
            }
        }
        groups
    }
}

fn check_order(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("moment order r must be positive, got {r}")))
    }
}

/// `r int_0^inf t^(r-1) [1 - prod (1 - e^(-q t))^count] dt` over `(count, q)` groups.
fn moment_integral(groups: &[(f64, f64)], r: f64, s: &QuadratureSettings) -> Result<Estimate> {
    check_order(r)?;
    let q_min = groups.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    integrate_semi_infinite(
        |t: f64| {
            let log_all_seen: f64 = groups.iter().map(|&(c, q)| c * (-(-q * t).exp()).ln_1p()).sum();
            r * ((r - 1.0) * t.ln()).exp() * -log_all_seen.exp_m1()
        },
        // 1 - prod(1 - x_j) <= sum x_j, and int_t^inf r u^(r-1) e^(-q u) du = r Gamma(r, q t) / q^r
        |t: f64| {
            groups
                .iter()
                .map(|&(c, q)| c * r * upper_incomplete_gamma_bound(r, q * t) / q.powf(r))
                .sum()
        },
        1.0 / q_min,
        s,
    )
}

/// `E[S_N^(r)]` by quadrature of the Poissonized integral.
pub fn rising_moment(query: &RisingMomentQuery, s: &QuadratureSettings) -> Result<Estimate> {
    moment_integral(&query.grouped(), query.r, s)
}

/// `E[S_N^(r)]` by the subset expansion; exact for rational `q` and integer `r`.
pub fn rising_moment_subset_sum(query: &RisingMomentQuery) -> Result<Scalar> {
    subset_sum(&query.q, query.r)
}

fn subset_sum(q: &[Scalar], r: f64) -> Result<Scalar> {
    check_order(r)?;
    let n = q.len();
    if n > SUBSET_SUM_MAX_COUPONS {
        return Err(Error::TooManyTerms {
            what: "subset expansion",
            needed: (1u128 << n) - 1,
            limit: (1u128 << SUBSET_SUM_MAX_COUPONS) - 1,
        });
    }
    let exact: Option<Vec<BigRational>> = q.iter().map(|x| x.as_exact().cloned()).collect();
    match exact {
        Some(qs) if r.fract() == 0.0 && r <= 64.0 => Ok(Scalar::Exact(subset_sum_exact(&qs, r as u32))),
        _ => {
            let qf: Vec<f64> = q.iter().map(Scalar::to_f64).collect();
            Ok(Scalar::Float(subset_sum_float(&qf, r)))
        }
    }
}

// Subset sums split into low and high halves so each is one addition.
fn half_sums<T: Clone + Zero + for<'a> std::ops::Add<&'a T, Output = T>>(items: &[T]) -> Vec<T> {
    let mut sums = vec![T::zero(); 1 << items.len()];
    for mask in 1usize..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)].clone() + &items[low];
    }
    sums
}

fn subset_sum_float(q: &[f64], r: f64) -> f64 {
    let split = q.len() / 2;
    let lo = half_sums(&q[..split]);
    let hi = half_sums(&q[split..]);
    let mut total = CompensatedSum::default();
    for (h, hs) in hi.iter().enumerate() {
        for (l, ls) in lo.iter().enumerate() {
            let mask_bits = (h.count_ones() + l.count_ones()) as usize;
            if mask_bits == 0 {
                continue;
            }
            let term = (-r * (hs + ls).ln()).exp();
            total.add(if mask_bits % 2 == 1 { term } else { -term });
        }
    }
    gamma(r + 1.0) * total.value()
}

fn subset_sum_exact(q: &[BigRational], r: u32) -> BigRational {
    let common = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = q
        .iter()
        .map(|x| (x * BigRational::from_integer(common.clone())).to_integer())
        .collect();
    let split = scaled.len() / 2;
    let lo = half_sums(&scaled[..split]);
    let hi = half_sums(&scaled[split..]);
    let mut counts: HashMap<BigInt, i64> = HashMap::new();
    for (h, hs) in hi.iter().enumerate() {
        for (l, ls) in lo.iter().enumerate() {
            let bits = h.count_ones() + l.count_ones();
            if bits == 0 {
                continue;
            }
            *counts.entry(hs + ls).or_default() += if bits % 2 == 1 { 1 } else { -1 };
        }
    }
    let factorial: BigInt = (1..=r).map(BigInt::from).product();
    let scale = num_traits::pow(common, r as usize) * factorial;
    let mut total = BigRational::zero();
    let mut keys: Vec<_> = counts.into_iter().filter(|(_, c)| *c != 0).collect();
    keys.sort();
    for (sum, count) in keys {
        total += BigRational::new(BigInt::from(count) * &scale, num_traits::pow(sum, r as usize));
    }
    total
}

/// `E[T^(r)]` for the total collection time of a mixture.
pub fn mixture_moment(m: &GroupMixture, r: f64, s: &QuadratureSettings) -> Result<Estimate> {
    let groups: Vec<(f64, f64)> = m.groups().iter().map(|g| (g.count as f64, g.prob.to_f64())).collect();
    moment_integral(&groups, r, s)
}

/// `E[T_j^(r)]` for the completion time of one group (zero-based index).
pub fn group_moment(m: &GroupMixture, group: usize, r: f64, s: &QuadratureSettings) -> Result<Estimate> {
    m.check_group(group)?;
    let g = &m.groups()[group];
    moment_integral(&[(g.count as f64, g.prob.to_f64())], r, s)
}

/// Subset expansion over the coupons of one group.
pub fn group_moment_subset_sum(m: &GroupMixture, group: usize, r: f64) -> Result<Scalar> {
    m.check_group(group)?;
    let g = &m.groups()[group];
    if g.count as usize > SUBSET_SUM_MAX_COUPONS {
        return Err(Error::TooManyTerms {
            what: "subset expansion",
            needed: (1u128 << g.count.min(127)) - 1,
            limit: (1u128 << SUBSET_SUM_MAX_COUPONS) - 1,
        });
    }
    subset_sum(&vec![g.prob.clone(); g.count as usize], r)
}

/// `E[S(theta)] = N H_N / (1 - theta) + int_0^inf e^(-theta t) (1 - e^(-(1-theta) t/N))^N dt`.
pub fn theta_mean_exact(x: &ThetaExample, s: &QuadratureSettings) -> Result<Estimate> {
    let n = x.n as f64;
    let theta = x.theta;
    let light = (1.0 - theta) / n;
    let main = n * harmonic(x.n) / (1.0 - theta);
    let remainder = integrate_semi_infinite(
        |t: f64| (-theta * t).exp() * (n * (-(-light * t).exp()).ln_1p()).exp(),
        |t: f64| (-theta * t).exp() / theta,
        1.0 / theta,
        s,
    )?;
    Ok(Estimate { value: main + remainder.value, error: remainder.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{uniform_mean, uniform_second_rising};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rising_moment_examples() {
        let s = QuadratureSettings::default();
        let v = rising_moment(&RisingMomentQuery::new(vec![1.0], 1.0).unwrap(), &s).unwrap();
        assert!((v.value - 1.0).abs() < 1e-10);
        let v = rising_moment(&RisingMomentQuery::new(vec![0.5, 0.5], 2.0).unwrap(), &s).unwrap();
        assert!((v.value - 14.0).abs() < 1e-9);
        let v = rising_moment(&RisingMomentQuery::new(vec![1.0 / 3.0, 2.0 / 3.0], 1.0).unwrap(), &s).unwrap();
        assert!((v.value - 3.5).abs() < 1e-9);
    }

    #[test]
    fn subset_examples() {
        let one = RisingMomentQuery::exact(vec![rat(1, 1)], 1.0).unwrap();
        assert_eq!(rising_moment_subset_sum(&one).unwrap(), Scalar::exact(1, 1));
        let race = RisingMomentQuery::exact(vec![rat(1, 3), rat(2, 3)], 1.0).unwrap();
        assert_eq!(rising_moment_subset_sum(&race).unwrap(), Scalar::exact(7, 2));
        let float = RisingMomentQuery::new(vec![1.0 / 3.0, 2.0 / 3.0], 1.0).unwrap();
        assert!((rising_moment_subset_sum(&float).unwrap().to_f64() - 3.5).abs() < 1e-14);
    }

    #[test]
    fn subset_and_quadrature_agree_on_three_coupons() {
        // q = (1/4, 1/4, 1/2), r = 2:
        // 2 [16 + 16 + 4 - 1/(1/2)^2 - 2/(3/4)^2 + 1] = 2 [33 - 32/9] = 530/9
        let q = RisingMomentQuery::exact(vec![rat(1, 4), rat(1, 4), rat(1, 2)], 2.0).unwrap();
        let exact = rising_moment_subset_sum(&q).unwrap();
        assert_eq!(exact, Scalar::exact(530, 9));
        let quad = rising_moment(&q, &QuadratureSettings::default()).unwrap();
        assert!((quad.value - 530.0 / 9.0).abs() <= 1e-8 * 530.0 / 9.0);
    }

    #[test]
    fn uniform_closed_forms_by_quadrature() {
        let s = QuadratureSettings::default();
        for n in [1u64, 2, 5, 17, 64] {
            let q = RisingMomentQuery::new(vec![1.0 / n as f64; n as usize], 1.0).unwrap();
            let mean = rising_moment(&q, &s).unwrap().value;
            assert!((mean - uniform_mean(n)).abs() <= 1e-8 * uniform_mean(n), "n = {n}");
            let q = RisingMomentQuery::new(vec![1.0 / n as f64; n as usize], 2.0).unwrap();
            let second = rising_moment(&q, &s).unwrap().value;
            assert!((second - uniform_second_rising(n)).abs() <= 1e-9 * uniform_second_rising(n), "n = {n}");
        }
    }

    #[test]
    fn query_validation() {
        assert!(RisingMomentQuery::new(vec![0.5, 0.5], 0.0).is_err());
        assert!(RisingMomentQuery::new(vec![0.5, 0.4], 1.0).is_err());
        assert!(RisingMomentQuery::new(vec![], 1.0).is_err());
        assert!(RisingMomentQuery::new(vec![1.5, -0.5], 1.0).is_err());
        let big = RisingMomentQuery::new(vec![1.0 / 26.0; 26], 1.0).unwrap();
        assert!(matches!(rising_moment_subset_sum(&big), Err(Error::TooManyTerms { .. })));
    }

    #[test]
    fn mixture_moment_examples() {
        let s = QuadratureSettings::default();
        let m = GroupMixture::from_fractions(&[(3, 1, 3)]).unwrap();
        assert!((mixture_moment(&m, 1.0, &s).unwrap().value - 5.5).abs() < 1e-9);
        let m = GroupMixture::from_fractions(&[(1, 1, 3), (1, 2, 3)]).unwrap();
        assert!((mixture_moment(&m, 1.0, &s).unwrap().value - 3.5).abs() < 1e-9);
        // u* = 4 + 4 + 2 - 2 - 2*(4/3) + 1 = 19/3 by the subset expansion
        let m = GroupMixture::from_fractions(&[(2, 1, 4), (1, 1, 2)]).unwrap();
        let u = rising_moment_subset_sum(&RisingMomentQuery::from_mixture(&m, 1.0).unwrap()).unwrap();
        assert_eq!(u, Scalar::exact(19, 3));
        assert!((mixture_moment(&m, 1.0, &s).unwrap().value - 19.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn group_moment_is_a_uniform_collection_slowed_down() {
        // T_1 for M1 coupons at p1 each: scale of the uniform problem by 1/(M1 p1)
        let s = QuadratureSettings::default();
        let m = GroupMixture::from_fractions(&[(4, 1, 8), (1, 1, 2)]).unwrap();
        let v = group_moment(&m, 0, 1.0, &s).unwrap().value;
        // E[T_1] = sum_{i<4} 1/((4-i) p1) = 8 H_4
        assert!((v - 8.0 * harmonic(4)).abs() < 1e-9);
        let sub = group_moment_subset_sum(&m, 0, 1.0).unwrap();
        assert_eq!(sub, Scalar::Exact(BigRational::from_integer(8.into()) * rat(25, 12)));
    }

    #[test]
    fn theta_examples() {
        let s = QuadratureSettings::default();
        let v = theta_mean_exact(&ThetaExample::new(1, 0.5).unwrap(), &s).unwrap();
        assert!((v.value - 3.0).abs() < 1e-9);
        let v = theta_mean_exact(&ThetaExample::new(1, 1.0 / 3.0).unwrap(), &s).unwrap();
        assert!((v.value - 3.5).abs() < 1e-9);
        let x = ThetaExample::new(50, 0.5).unwrap();
        let v = theta_mean_exact(&x, &s).unwrap();
        let direct = rising_moment(&RisingMomentQuery::new(x.coupon_probabilities(), 1.0).unwrap(), &s).unwrap();
        assert!((v.value - direct.value).abs() < 1e-6);
    }
}
