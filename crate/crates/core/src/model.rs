//! Mixture configurations: groups of equally likely coupons, the two-group
//! scaling family, and the one-heavy-coupon example.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::error::{Error, MixtureViolation, Result};
use crate::scalar::{parse_rational, Scalar};

/// Tolerance on `sum_j M_j p_j = 1` when any probability is a double.
pub const FLOAT_NORMALIZATION_TOL: f64 = 1e-12;

/// `count` coupons, each drawn with probability `prob`.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub count: u64,
    pub prob: Scalar,
}

impl Group {
    pub fn new(count: u64, prob: Scalar) -> Self {
        Group { count, prob }
    }

    pub fn exact(count: u64, num: i64, den: i64) -> Self {
        Group { count, prob: Scalar::exact(num, den) }
    }

    /// Probability that a single draw lands in this group, `M_j p_j`.
    pub fn weight(&self) -> f64 {
        self.count as f64 * self.prob.to_f64()
    }
}

/// A validated pool of uniform groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMixture {
    groups: Vec<Group>,
}

impl GroupMixture {
    pub fn new(groups: Vec<Group>) -> Result<Self> {
        validate(&groups)?;
        Ok(GroupMixture { groups })
    }

    /// Convenience for exact mixtures given as `(count, numerator, denominator)`.
    pub fn from_fractions(groups: &[(u64, i64, i64)]) -> Result<Self> {
        Self::new(groups.iter().map(|&(m, n, d)| Group::exact(m, n, d)).collect())
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Number of groups `g`.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.groups.iter().map(|g| g.count).collect()
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.prob.to_f64()).collect()
    }

    /// Exact probabilities, if every group has one.
    pub fn probs_exact(&self) -> Option<Vec<BigRational>> {
        self.groups.iter().map(|g| g.prob.as_exact().cloned()).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.groups.iter().all(|g| g.prob.is_exact())
    }

    pub fn total_coupons(&self) -> u64 {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// Per-coupon probability vector, group by group.
    pub fn coupon_probabilities(&self) -> Vec<f64> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.prob.to_f64(), g.count as usize))
            .collect()
    }

    /// The same mixture with groups listed in the opposite order.
    pub fn reversed(&self) -> GroupMixture {
        let mut groups = self.groups.clone();
        groups.reverse();
        GroupMixture { groups }
    }

    pub fn check_group(&self, index: usize) -> Result<()> {
        if index < self.groups.len() {
            Ok(())
        } else {
            Err(Error::GroupIndex { index: index + 1, groups: self.groups.len() })
        }
    }
}

impl fmt::Display for GroupMixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", g.count, g.prob)?;
        }
        Ok(())
    }
}

/// Inline syntax `count:prob[,count:prob...]`; probabilities parse exactly.
impl FromStr for GroupMixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut groups = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (count, prob) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected count:prob, got {part:?}")))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coupon count {count:?}")))?;
            groups.push(Group::new(count, prob.parse()?));
        }
        GroupMixture::new(groups)
    }
}

/// Checks every mixture invariant, reporting the first that fails.
pub fn validate(groups: &[Group]) -> Result<()> {
    let fail = |v| Err(Error::InvalidMixture(v));
    if groups.is_empty() {
        return fail(MixtureViolation::NoGroups);
    }
    for (i, g) in groups.iter().enumerate() {
        if g.count == 0 {
            return fail(MixtureViolation::ZeroCount { group: i });
        }
        if !g.prob.is_positive() || !g.prob.to_f64().is_finite() {
            return fail(MixtureViolation::NonPositiveProbability { group: i, value: g.prob.to_f64() });
        }
    }
    let exact: Option<Vec<&BigRational>> = groups.iter().map(|g| g.prob.as_exact()).collect();
    match exact {
        Some(probs) => {
            let total: BigRational = groups
                .iter()
                .zip(probs)
                .map(|(g, p)| p * BigInt::from(g.count))
                .fold(BigRational::zero(), |acc, x| acc + x);
            let residual = total - BigRational::one();
            if !residual.is_zero() {
                return fail(MixtureViolation::NotNormalized { residual: Scalar::Exact(residual) });
            }
        }
        None => {
            let residual = groups.iter().map(Group::weight).sum::<f64>() - 1.0;
            if residual.abs() > FLOAT_NORMALIZATION_TOL {
                return fail(MixtureViolation::NotNormalized { residual: Scalar::Float(residual) });
            }
        }
    }
    Ok(())
}

/// Two groups with `M_1 = nu1 * M`, `M_2 = nu2 * M` and fixed ratio `lambda = p2 / p1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFamily {
    pub nu1: u64,
    pub nu2: u64,
    pub lambda: f64,
    pub m: u64,
}

impl ScalingFamily {
    pub fn new(nu1: u64, nu2: u64, lambda: f64, m: u64) -> Result<Self> {
        let f = ScalingFamily { nu1, nu2, lambda, m };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<()> {
        if self.nu1 == 0 || self.nu2 == 0 || self.m == 0 {
            return Err(Error::InvalidScaling("nu1, nu2 and M must be positive integers".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidScaling(format!("lambda must be positive, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn with_m(self, m: u64) -> Self {
        ScalingFamily { m, ..self }
    }

    /// Exchanges the roles of the two groups (`lambda -> 1/lambda`).
    pub fn swapped(self) -> Self {
        ScalingFamily { nu1: self.nu2, nu2: self.nu1, lambda: 1.0 / self.lambda, m: self.m }
    }

    pub fn m1(&self) -> u64 {
        self.nu1 * self.m
    }

    pub fn m2(&self) -> u64 {
        self.nu2 * self.m
    }

    /// Group 1's share of each draw, `nu1 / (nu1 + lambda nu2)`.
    pub fn alpha1(&self) -> f64 {
        self.nu1 as f64 / self.c1()
    }

    pub fn alpha2(&self) -> f64 {
        self.lambda * self.nu2 as f64 / self.c1()
    }

    /// Scale constant for group 1 and for the total time: `nu1 + lambda nu2`.
    pub fn c1(&self) -> f64 {
        self.nu1 as f64 + self.lambda * self.nu2 as f64
    }

    /// Scale constant for group 2: `nu1 / lambda + nu2`.
    pub fn c2(&self) -> f64 {
        self.nu1 as f64 / self.lambda + self.nu2 as f64
    }

    /// Recovers the family from a two-group mixture, using `M = gcd(M_1, M_2)`.
    pub fn from_mixture(m: &GroupMixture) -> Result<Self> {
        if m.len() != 2 {
            return Err(Error::Domain(format!("scaling family needs 2 groups, mixture has {}", m.len())));
        }
        let (m1, m2) = (m.groups()[0].count, m.groups()[1].count);
        let base = m1.gcd(&m2);
        let lambda = m.groups()[1].prob.to_f64() / m.groups()[0].prob.to_f64();
        ScalingFamily::new(m1 / base, m2 / base, lambda, base)
    }
}

impl FromStr for ScalingFamily {
    type Err = Error;

    /// `nu1,nu2,lambda,M`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected nu1,nu2,lambda,M, got {s:?}")));
        }
        let int = |t: &str| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer {t:?}")));
        let lambda: f64 = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad lambda {:?}", parts[2])))?;
        ScalingFamily::new(int(parts[0])?, int(parts[1])?, lambda, int(parts[3])?)
    }
}

/// Builds the two-group mixture of a scaling family.
///
/// Probabilities are exact: `lambda` is converted from its binary value, so
/// `lambda = 2` gives `p = (1/(3M), 2/(3M))`.
pub fn mixture_from_scaling(f: &ScalingFamily) -> Result<GroupMixture> {
    f.check()?;
    let lambda = BigRational::from_float(f.lambda)
        .ok_or_else(|| Error::InvalidScaling(format!("lambda {} is not finite", f.lambda)))?;
    let nu1 = BigRational::from_integer(f.nu1.into());
    let nu2 = BigRational::from_integer(f.nu2.into());
    let m = BigRational::from_integer(f.m.into());
    let denom = &nu1 + &lambda * &nu2;
    let alpha1 = &nu1 / &denom;
    let alpha2 = &lambda * &nu2 / &denom;
    let p1 = alpha1 / (&nu1 * &m);
    let p2 = alpha2 / (&nu2 * &m);
    GroupMixture::new(vec![
        Group::new(f.m1(), Scalar::Exact(p1)),
        Group::new(f.m2(), Scalar::Exact(p2)),
    ])
}

/// Coupons `{0, ..., N}` with `q_0 = theta` and `q_j = (1 - theta) / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaExample {
    pub n: u64,
    pub theta: f64,
}

impl ThetaExample {
    pub fn new(n: u64, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Domain(format!("theta must lie in (0, 1), got {theta}")));
        }
        Ok(ThetaExample { n, theta })
    }

    /// Group 1 is the single heavy coupon, group 2 the `N` light ones.
    pub fn mixture(&self) -> GroupMixture {
        let theta = BigRational::from_float(self.theta).expect("theta is finite");
        let light = (BigRational::one() - &theta) / BigRational::from_integer(self.n.into());
        GroupMixture::new(vec![
            Group::new(1, Scalar::Exact(theta)),
            Group::new(self.n, Scalar::Exact(light)),
        ])
        .expect("theta example is normalized by construction")
    }

    pub fn coupon_probabilities(&self) -> Vec<f64> {
        let mut q = vec![self.theta];
        q.extend(std::iter::repeat_n((1.0 - self.theta) / self.n as f64, self.n as usize));
        q
    }
}

/// Two-group mixtures bracketing a `g`-group mixture.
///
/// Groups are sorted by probability. Case (i) pools groups `2..g` at the level
/// `p_2`, case (ii) at `p_g`. Both probabilities of each case are then scaled
/// by a common factor so the result is normalized; this keeps the ratio
/// `p_2/p_1` (resp. `p_g/p_1`) that governs the race between the two groups.
/// The pair is a heuristic bracket, not a certified stochastic bound.
pub fn bounding_two_group_mixtures(m: &GroupMixture) -> Result<(GroupMixture, GroupMixture)> {
    if m.len() < 2 {
        return Err(Error::Domain(format!("bounding needs at least 2 groups, got {}", m.len())));
    }
    let mut groups = m.groups().to_vec();
    groups.sort_by(|a, b| a.prob.to_f64().total_cmp(&b.prob.to_f64()));
    let lowest = groups[0].clone();
    let pooled: u64 = groups[1..].iter().map(|g| g.count).sum();
    let case = |level: &Scalar| -> Result<GroupMixture> {
        let (p_low, p_high) = match (&lowest.prob, level) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                let total = a * BigInt::from(lowest.count) + b * BigInt::from(pooled);
                (Scalar::Exact(a / &total), Scalar::Exact(b / &total))
            }
            (a, b) => {
                let (a, b) = (a.to_f64(), b.to_f64());
                let total = a * lowest.count as f64 + b * pooled as f64;
                (Scalar::Float(a / total), Scalar::Float(b / total))
            }
        };
        GroupMixture::new(vec![Group::new(lowest.count, p_low), Group::new(pooled, p_high)])
    };
    let first = case(&groups[1].prob)?;
    let last = case(&groups[groups.len() - 1].prob)?;
    Ok((first, last))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ProbSpec {
    Text(String),
    Number(f64),
}

#[derive(Debug, Deserialize)]
struct GroupSpec {
    count: u64,
    prob: ProbSpec,
}

#[derive(Debug, Deserialize)]
struct ScalingSpec {
    nu1: u64,
    nu2: u64,
    lambda: f64,
    #[serde(rename = "M")]
    m: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigSpec {
    groups: Option<Vec<GroupSpec>>,
    scaling: Option<ScalingSpec>,
}

/// A configuration file: either explicit groups or a scaling family.
#[derive(Debug, Clone, PartialEq)]
pub enum MixtureConfig {
    Groups(GroupMixture),
    Scaling(ScalingFamily),
}

impl MixtureConfig {
    /// Parses `{"groups":[{"count":..,"prob":"num/den"|float},..]}` or
    /// `{"scaling":{"nu1":..,"nu2":..,"lambda":..,"M":..}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ConfigSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("config JSON: {e}")))?;
        match (spec.groups, spec.scaling) {
            (Some(groups), None) => {
                let groups = groups
                    .into_iter()
                    .map(|g| {
                        let prob = match g.prob {
                            ProbSpec::Text(s) => Scalar::Exact(parse_rational(&s)?),
                            ProbSpec::Number(x) => Scalar::Float(x),
                        };
                        Ok(Group::new(g.count, prob))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(MixtureConfig::Groups(GroupMixture::new(groups)?))
            }
            (None, Some(s)) => Ok(MixtureConfig::Scaling(ScalingFamily::new(s.nu1, s.nu2, s.lambda, s.m)?)),
            _ => Err(Error::Parse("config must contain exactly one of \"groups\" or \"scaling\"".into())),
        }
    }

    pub fn mixture(&self) -> Result<GroupMixture> {
        match self {
            MixtureConfig::Groups(m) => Ok(m.clone()),
            MixtureConfig::Scaling(f) => mixture_from_scaling(f),
        }
    }

    pub fn scaling(&self) -> Result<ScalingFamily> {
        match self {
            MixtureConfig::Groups(m) => ScalingFamily::from_mixture(m),
            MixtureConfig::Scaling(f) => Ok(*f),
        }
    }
}

/// Ratio of two exact probabilities, or `None` for float mixtures.
pub fn exact_ratio(a: &Scalar, b: &Scalar) -> Option<BigRational> {
    match (a, b) {
        (Scalar::Exact(a), Scalar::Exact(b)) if !b.is_zero() => Some(a / b),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::exact(n, d)
    }

    #[test]
    fn scaling_examples() {
        let m = mixture_from_scaling(&ScalingFamily::new(1, 1, 1.0, 1).unwrap()).unwrap();
        assert_eq!(m.counts(), vec![1, 1]);
        assert_eq!(m.groups()[0].prob, q(1, 2));
        assert_eq!(m.groups()[1].prob, q(1, 2));

        let m = mixture_from_scaling(&ScalingFamily::new(1, 1, 2.0, 1).unwrap()).unwrap();
        assert_eq!(m.groups()[0].prob, q(1, 3));
        assert_eq!(m.groups()[1].prob, q(2, 3));

        let m = mixture_from_scaling(&ScalingFamily::new(1, 1, 2.0, 5).unwrap()).unwrap();
        assert_eq!(m.counts(), vec![5, 5]);
        assert_eq!(m.groups()[0].prob, q(1, 15));
        assert_eq!(m.groups()[1].prob, q(2, 15));
    }

    #[test]
    fn scaling_rejects_nonpositive_lambda() {
        assert!(ScalingFamily::new(1, 1, 0.0, 3).is_err());
        assert!(ScalingFamily::new(1, 1, -1.0, 3).is_err());
        let f = ScalingFamily { nu1: 1, nu2: 1, lambda: -2.0, m: 1 };
        assert!(matches!(mixture_from_scaling(&f), Err(Error::InvalidScaling(_))));
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&[Group::new(2, q(1, 4)), Group::new(1, q(1, 2))]).is_ok());
        assert!(validate(&[Group::new(1, q(1, 1))]).is_ok());
        match validate(&[Group::new(1, q(1, 2)), Group::new(1, q(1, 3))]) {
            Err(Error::InvalidMixture(MixtureViolation::NotNormalized { residual })) => {
                assert_eq!(residual, q(-1, 6));
            }
            other => panic!("expected residual failure, got {other:?}"),
        }
    }

    #[test]
    fn validate_reports_each_violation() {
        assert!(matches!(
            validate(&[]),
            Err(Error::InvalidMixture(MixtureViolation::NoGroups))
        ));
        assert!(matches!(
            validate(&[Group::new(0, q(1, 1))]),
            Err(Error::InvalidMixture(MixtureViolation::ZeroCount { group: 0 }))
        ));
        assert!(matches!(
            validate(&[Group::new(1, q(1, 1)), Group::new(1, q(0, 1))]),
            Err(Error::InvalidMixture(MixtureViolation::NonPositiveProbability { group: 1, .. }))
        ));
        // float mode tolerance
        assert!(validate(&[Group::new(3, Scalar::Float(1.0 / 3.0))]).is_ok());
        assert!(validate(&[Group::new(3, Scalar::Float(0.3333))]).is_err());
    }

    #[test]
    fn inline_syntax() {
        let m: GroupMixture = "1:1/3, 1:2/3".parse().unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.is_exact());
        assert_eq!(m.to_string(), "1:1/3,1:2/3");
        assert!("1:1/3,1:1/3".parse::<GroupMixture>().is_err());
        assert!("1-1/3".parse::<GroupMixture>().is_err());
        let f: ScalingFamily = "2,3,1.5,50".parse().unwrap();
        assert_eq!((f.nu1, f.nu2, f.lambda, f.m), (2, 3, 1.5, 50));
    }

    #[test]
    fn json_config() {
        let c = MixtureConfig::from_json(r#"{"groups":[{"count":2,"prob":"1/4"},{"count":1,"prob":0.5}]}"#).unwrap();
        let m = c.mixture().unwrap();
        assert!(!m.is_exact());
        assert_eq!(m.counts(), vec![2, 1]);
        let c = MixtureConfig::from_json(r#"{"scaling":{"nu1":1,"nu2":2,"lambda":2.5,"M":10}}"#).unwrap();
        assert_eq!(c.mixture().unwrap().counts(), vec![10, 20]);
        assert!(MixtureConfig::from_json(r#"{"groups":[{"count":1,"prob":"1/2"}]}"#).is_err());
        assert!(MixtureConfig::from_json(r#"{}"#).is_err());
    }

    #[test]
    fn family_roundtrip_through_mixture() {
        let f = ScalingFamily::new(2, 3, 1.5, 7).unwrap();
        let back = ScalingFamily::from_mixture(&mixture_from_scaling(&f).unwrap()).unwrap();
        assert_eq!((back.nu1, back.nu2, back.m), (2, 3, 7));
        assert!((back.lambda - 1.5).abs() < 1e-14);
    }

    #[test]
    fn bounding_identity_for_two_groups() {
        let m = GroupMixture::from_fractions(&[(2, 1, 4), (1, 1, 2)]).unwrap();
        let (a, b) = bounding_two_group_mixtures(&m).unwrap();
        assert_eq!(a, m);
        assert_eq!(b, m);
    }

    #[test]
    fn bounding_pools_upper_groups() {
        let m = GroupMixture::from_fractions(&[(1, 1, 6), (1, 1, 3), (1, 1, 2)]).unwrap();
        let (a, b) = bounding_two_group_mixtures(&m).unwrap();
        assert_eq!(a.counts(), vec![1, 2]);
        assert_eq!(b.counts(), vec![1, 2]);
        // ratios p_2/p_1 = 2 and p_3/p_1 = 3 survive the renormalization
        assert_eq!(exact_ratio(&a.groups()[1].prob, &a.groups()[0].prob), Some(BigRational::from_integer(2.into())));
        assert_eq!(exact_ratio(&b.groups()[1].prob, &b.groups()[0].prob), Some(BigRational::from_integer(3.into())));
        assert!(bounding_two_group_mixtures(&GroupMixture::from_fractions(&[(1, 1, 1)]).unwrap()).is_err());
    }

    #[test]
    fn theta_mixture_is_exact() {
        let x = ThetaExample::new(4, 0.25).unwrap();
        let m = x.mixture();
        assert!(m.is_exact());
        assert_eq!(m.counts(), vec![1, 4]);
        assert_eq!(m.groups()[1].prob, q(3, 16));
        assert!(ThetaExample::new(3, 1.0).is_err());
    }
}
