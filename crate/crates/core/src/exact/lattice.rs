//! First detection by the absorbing-chain recursion on the lattice of
//! remaining-coupon counts.
//!
//! With `n_j` coupons of group `j` still missing, the next *new* coupon
//! belongs to group `j` with probability `p_j n_j / sum_k p_k n_k`, so
//!
//! ```text
//! v(n) = sum_j p_j n_j v(n - e_j) / sum_j p_j n_j,    all n_j >= 1,
//! ```
//!
//! with `v = 1` where only `n_l` is zero and `v = 0` where only some other
//! `n_k` is zero. The answer is `v(M_1, ..., M_g)`.

use num_rational::BigRational;
use num_traits::Num;

use crate::error::{Error, Result};
use crate::model::GroupMixture;
use crate::scalar::Scalar;

/// Default lattice memory budget (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: u128 = 2 << 30;

// rough per-cell footprint of a small rational (two heap-backed integers)
const RATIONAL_CELL_BYTES: u128 = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOptions {
    pub budget_bytes: u128,
    /// Use rational arithmetic when the mixture is exact.
    pub exact: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { budget_bytes: DEFAULT_MEMORY_BUDGET, exact: true }
    }
}

pub(crate) fn lattice_size(m: &GroupMixture) -> u128 {
    m.groups()
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.count as u128 + 1))
}

pub(crate) fn dp_bytes(m: &GroupMixture, exact: bool) -> u128 {
    let cell = if exact { RATIONAL_CELL_BYTES } else { std::mem::size_of::<f64>() as u128 };
    lattice_size(m).saturating_mul(cell)
}

/// `P{T_l = T_min}` (zero-based `l`) by the lattice recursion; exact for exact mixtures.
pub fn first_detection_prob_dp(m: &GroupMixture, l: usize) -> Result<Scalar> {
    first_detection_prob_dp_with(m, l, &DpOptions::default())
}

pub fn first_detection_prob_dp_with(m: &GroupMixture, l: usize, opts: &DpOptions) -> Result<Scalar> {
    m.check_group(l)?;
    let exact = opts.exact && m.is_exact();
    let needed = dp_bytes(m, exact);
    if needed > opts.budget_bytes {
        return Err(Error::MemoryBudget { needed, budget: opts.budget_bytes });
    }
    let counts = m.counts();
    if exact {
        let probs = m.probs_exact().expect("exact mixture");
        Ok(Scalar::Exact(solve::<BigRational>(&counts, &probs, l)))
    } else {
        Ok(Scalar::Float(solve::<f64>(&counts, &m.probs_f64(), l)))
    }
}

fn solve<T: Num + Clone>(counts: &[u64], probs: &[T], l: usize) -> T {
    let g = counts.len();
    let dims: Vec<usize> = counts.iter().map(|&c| c as usize + 1).collect();
    let mut strides = vec![1usize; g];
    for j in (0..g.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * dims[j + 1];
    }
    let size = strides[0] * dims[0];

    // rates[j][n] = p_j * n
    let rates: Vec<Vec<T>> = (0..g)
        .map(|j| {
            let mut row = vec![T::zero(); dims[j]];
            for n in 1..dims[j] {
                row[n] = row[n - 1].clone() + probs[j].clone();
            }
            row
        })
        .collect();

    // Row-major order visits n - e_j (index - stride_j) before n.
    let mut v: Vec<T> = Vec::with_capacity(size);
    let mut n = vec![0usize; g];
    for idx in 0..size {
        let zeros = n.iter().filter(|&&x| x == 0).count();
        let cell = match zeros {
            0 => {
                let mut num = T::zero();
                let mut den = T::zero();
                for j in 0..g {
                    let rate = &rates[j][n[j]];
                    num = num + rate.clone() * v[idx - strides[j]].clone();
                    den = den + rate.clone();
                }
                num / den
            }
            1 if n[l] == 0 => T::one(),
            // absorbed elsewhere, or unreachable from the interior
            _ => T::zero(),
        };
        v.push(cell);
        for j in (0..g).rev() {
            n[j] += 1;
            if n[j] < dims[j] {
                break;
            }
            n[j] = 0;
        }
    }
    v.pop().expect("lattice is non-empty")
}
