use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Largest `N` for which [`harmonic_exact`] builds the rational.
pub const HARMONIC_EXACT_MAX: u64 = 10_000;

/// `H_N = sum_{j<=N} 1/j`, summed smallest term first.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|j| 1.0 / j as f64).sum()
}

/// `sum_{j<=N} 1/j^2`.
pub fn basel_partial(n: u64) -> f64 {
    (1..=n).rev().map(|j| 1.0 / (j as f64 * j as f64)).sum()
}

/// Exact `H_N` for `1 <= N <= 10^4`.
pub fn harmonic_exact(n: u64) -> Option<BigRational> {
    if n == 0 || n > HARMONIC_EXACT_MAX {
        return None;
    }
    let (p, q) = split_sum(1, n);
    Some(BigRational::new(p, q))
}

// sum_{j=a}^{b} 1/j as an unreduced fraction, by binary splitting.
fn split_sum(a: u64, b: u64) -> (BigInt, BigInt) {
    if a == b {
        return (BigInt::one(), BigInt::from(a));
    }
    let mid = a + (b - a) / 2;
    let (p1, q1) = split_sum(a, mid);
    let (p2, q2) = split_sum(mid + 1, b);
    (p1 * &q2 + p2 * &q1, q1 * q2)
}

/// Mean collection time for `N` equally likely coupons, `N H_N`.
pub fn uniform_mean(n: u64) -> f64 {
    n as f64 * harmonic(n)
}

/// `E[S_N (S_N + 1)] = N^2 (H_N^2 + sum_{j<=N} 1/j^2)` for `N` equally likely coupons.
pub fn uniform_second_rising(n: u64) -> f64 {
    let h = harmonic(n);
    let nf = n as f64;
    nf * nf * (h * h + basel_partial(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        assert_eq!(harmonic_exact(2), Some(BigRational::new(3.into(), 2.into())));
        assert_eq!(harmonic_exact(6), Some(BigRational::new(49.into(), 20.into())));
        assert!((harmonic(6) - 2.45).abs() < 1e-15);
        assert!(harmonic_exact(0).is_none());
        assert!(harmonic_exact(HARMONIC_EXACT_MAX + 1).is_none());
    }

    #[test]
    fn exact_and_float_agree() {
        for n in [1u64, 7, 100, 2_500, 10_000] {
            let exact = harmonic_exact(n).unwrap();
            let approx = crate::scalar::rational_to_f64(&exact);
            assert!((approx - harmonic(n)).abs() < 1e-13 * harmonic(n), "n = {n}");
        }
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(uniform_mean(1), 1.0);
        assert_eq!(uniform_mean(2), 3.0);
        assert!((uniform_mean(3) - 5.5).abs() < 1e-14);
        assert_eq!(uniform_second_rising(1), 2.0);
        assert!((uniform_second_rising(2) - 14.0).abs() < 1e-13);
    }

    #[test]
    fn second_rising_matches_geometric_sum_oracle() {
        // S_N is a sum of independent geometrics with success odds (N-i)/N;
        // E[S(S+1)] = Var + mean^2 + mean.
        for n in 1..=40u64 {
            let nf = n as f64;
            let (mut mean, mut var) = (0.0, 0.0);
            for i in 0..n {
                let p = (nf - i as f64) / nf;
                mean += 1.0 / p;
                var += (1.0 - p) / (p * p);
            }
            let oracle = var + mean * mean + mean;
            assert!((uniform_second_rising(n) - oracle).abs() <= 1e-12 * oracle, "n = {n}");
        }
    }
}
