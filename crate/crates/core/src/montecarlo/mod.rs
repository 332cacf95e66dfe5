//! Seeded, reproducible simulation of the coupon process.
//!
//! Trial `i` draws from a ChaCha8 stream keyed by the seed with stream id `i`,
//! so every trial is independent of how trials are scheduled. Trials are cut
//! into fixed chunks, chunks run on a pool of `workers` threads, and chunk
//! results are merged in index order: the summary is bit-identical for any
//! worker count.

mod accum;
mod normalize;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::GroupMixture;
use accum::Moments;

pub use normalize::{normalized_samples, Normalization};

/// Draws allowed in a single trial before it is abandoned.
pub const MAX_DRAWS_PER_TRIAL: u64 = 1_000_000_000;
/// Most sample values a run may retain.
pub const MAX_RETAINED_VALUES: u64 = 1_000_000;
const CHUNK_TRIALS: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Retain {
    #[default]
    None,
    /// Keep `T` for every trial.
    Total,
    /// Keep `T` and every `T_j`.
    All,
}

impl fmt::Display for Retain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Retain::None => "none",
            Retain::Total => "T",
            Retain::All => "all",
        })
    }
}

impl FromStr for Retain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Retain::None),
            "T" | "t" | "total" => Ok(Retain::Total),
            "all" => Ok(Retain::All),
            _ => Err(Error::Parse(format!("unknown retention {s:?} (none|T|all)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
    pub workers: usize,
    pub retain: Retain,
    /// Order `r` of the rising moment `E[X^(r)]` estimated alongside mean and variance.
    pub rising_order: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { seed: 0, trials: 100_000, workers: 1, retain: Retain::None, rising_order: 2.0 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Simulation("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Simulation("workers must be at least 1".into()));
        }
        if !(self.rising_order > 0.0 && self.rising_order.is_finite()) {
            return Err(Error::Domain(format!("moment order r must be positive, got {}", self.rising_order)));
        }
        Ok(())
    }
}

/// One run of the process until every coupon has been seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Draw at which each group was completed.
    pub t_group: Vec<u64>,
    pub t_total: u64,
    /// Zero-based index of the first completed group.
    pub first_group: usize,
}

/// Draw-by-draw simulator: a group by its total weight `M_j p_j`, then a
/// uniform coupon inside it.
#[derive(Debug, Clone)]
pub struct CouponSampler {
    cumulative: Vec<f64>,
    counts: Vec<u64>,
    offsets: Vec<usize>,
    seen: Vec<bool>,
    missing: Vec<u64>,
}

impl CouponSampler {
    pub fn new(m: &GroupMixture) -> Self {
        let counts = m.counts();
        let weights: Vec<f64> = m.groups().iter().map(|g| g.weight()).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        *cumulative.last_mut().expect("mixture has groups") = f64::INFINITY;
        let mut offsets = Vec::with_capacity(counts.len());
        let mut next = 0usize;
        for &c in &counts {
            offsets.push(next);
            next += c as usize;
        }
        CouponSampler { cumulative, missing: counts.clone(), counts, offsets, seen: vec![false; next] }
    }

    pub fn groups(&self) -> usize {
        self.counts.len()
    }

    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<TrialOutcome> {
        let g = self.counts.len();
        self.seen.fill(false);
        self.missing.copy_from_slice(&self.counts);
        let mut t_group = vec![0u64; g];
        let mut first_group = usize::MAX;
        let mut groups_left = g;
        let mut draws = 0u64;
        while groups_left > 0 {
            draws += 1;
            if draws > MAX_DRAWS_PER_TRIAL {
                return Err(Error::DrawLimit { limit: MAX_DRAWS_PER_TRIAL });
            }
            let u: f64 = rng.random();
            let j = self.cumulative.iter().position(|&c| u < c).unwrap_or(g - 1);
            let k = if self.counts[j] == 1 { 0 } else { rng.random_range(0..self.counts[j]) };
            let slot = &mut self.seen[self.offsets[j] + k as usize];
            if !*slot {
                *slot = true;
                self.missing[j] -= 1;
                if self.missing[j] == 0 {
                    t_group[j] = draws;
                    if first_group == usize::MAX {
                        first_group = j;
                    }
                    groups_left -= 1;
                }
            }
        }
        Ok(TrialOutcome { t_group, t_total: draws, first_group })
    }
}

/// Runs one trial of the coupon process for `m`.
pub fn simulate_trial<R: Rng + ?Sized>(m: &GroupMixture, rng: &mut R) -> Result<TrialOutcome> {
    CouponSampler::new(m).run(rng)
}

/// Stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `Gamma(x + r) / Gamma(x)`.
fn rising(x: f64, r: f64) -> f64 {
    if r.fract() == 0.0 && r <= 32.0 {
        (0..r as u32).fold(1.0, |acc, i| acc * (x + i as f64))
    } else {
        (crate::special::ln_gamma(x + r) - crate::special::ln_gamma(x)).exp()
    }
}

#[derive(Debug, Clone, Default)]
struct Accumulator {
    value: Moments,
    rising: Moments,
}

impl Accumulator {
    fn push(&mut self, x: u64, r: f64) {
        let x = x as f64;
        self.value.push(x);
        self.rising.push(rising(x, r));
    }

    fn merge(&mut self, o: &Accumulator) {
        self.value.merge(&o.value);
        self.rising.merge(&o.rising);
    }

    fn estimate(&self, r: f64) -> MomentEstimate {
        MomentEstimate {
            mean: self.value.mean(),
            mean_se: self.value.mean_se(),
            variance: self.value.variance(),
            variance_se: self.value.variance_se(),
            rising_order: r,
            rising_mean: self.rising.mean(),
            rising_se: self.rising.mean_se(),
        }
    }
}

/// Streaming estimates for one detection time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub rising_order: f64,
    /// Estimate of `E[X^(r)] = E[Gamma(X + r) / Gamma(X)]` at `rising_order`.
    pub rising_mean: f64,
    pub rising_se: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RetainedSamples {
    pub total: Vec<u64>,
    /// Per group, empty unless everything is retained.
    pub groups: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSummary {
    pub seed: u64,
    pub trials: u64,
    pub group_counts: Vec<u64>,
    pub first_freq: Vec<f64>,
    pub first_freq_se: Vec<f64>,
    pub groups: Vec<MomentEstimate>,
    pub total: MomentEstimate,
    #[serde(skip)]
    pub samples: Option<RetainedSamples>,
}

impl EmpiricalSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

#[derive(Debug, Clone)]
struct ChunkResult {
    first: Vec<u64>,
    groups: Vec<Accumulator>,
    total: Accumulator,
    samples: RetainedSamples,
}

fn run_chunk(m: &GroupMixture, cfg: &SimConfig, chunk: u64) -> Result<ChunkResult> {
    let mut sampler = CouponSampler::new(m);
    let g = sampler.groups();
    let start = chunk * CHUNK_TRIALS;
    let end = (start + CHUNK_TRIALS).min(cfg.trials);
    let mut out = ChunkResult {
        first: vec![0; g],
        groups: vec![Accumulator::default(); g],
        total: Accumulator::default(),
        samples: RetainedSamples {
            total: Vec::new(),
            groups: if cfg.retain == Retain::All { vec![Vec::new(); g] } else { Vec::new() },
        },
    };
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    for index in start..end {
        let mut rng = base.clone();
        rng.set_stream(index);
        let t = sampler.run(&mut rng)?;
        out.first[t.first_group] += 1;
        for (acc, &x) in out.groups.iter_mut().zip(&t.t_group) {
            acc.push(x, cfg.rising_order);
        }
        out.total.push(t.t_total, cfg.rising_order);
        if cfg.retain != Retain::None {
            out.samples.total.push(t.t_total);
        }
        if cfg.retain == Retain::All {
            for (s, &x) in out.samples.groups.iter_mut().zip(&t.t_group) {
                s.push(x);
            }
        }
    }
    Ok(out)
}

/// Simulates `cfg.trials` independent trials and summarizes them.
pub fn estimate(m: &GroupMixture, cfg: &SimConfig) -> Result<EmpiricalSummary> {
    cfg.validate()?;
    let g = m.len();
    let per_trial = match cfg.retain {
        Retain::None => 0,
        Retain::Total => 1,
        Retain::All => 1 + g as u64,
    };
    if cfg.trials.saturating_mul(per_trial) > MAX_RETAINED_VALUES {
        return Err(Error::Simulation(format!(
            "retaining {} values exceeds the cap of {MAX_RETAINED_VALUES}",
            cfg.trials.saturating_mul(per_trial)
        )));
    }
    let chunks = cfg.trials.div_ceil(CHUNK_TRIALS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Simulation(format!("thread pool: {e}")))?;
    let results: Vec<ChunkResult> =
        pool.install(|| (0..chunks).into_par_iter().map(|c| run_chunk(m, cfg, c)).collect::<Result<_>>())?;

    let mut first = vec![0u64; g];
    let mut groups = vec![Accumulator::default(); g];
    let mut total = Accumulator::default();
    let mut samples = RetainedSamples {
        total: Vec::new(),
        groups: if cfg.retain == Retain::All { vec![Vec::new(); g] } else { Vec::new() },
    };
    for chunk in &results {
        for j in 0..g {
            first[j] += chunk.first[j];
            groups[j].merge(&chunk.groups[j]);
        }
        total.merge(&chunk.total);
        samples.total.extend_from_slice(&chunk.samples.total);
        for (s, c) in samples.groups.iter_mut().zip(&chunk.samples.groups) {
            s.extend_from_slice(c);
        }
    }
    let n = cfg.trials as f64;
    debug_assert_eq!(total.value.count(), n);
    let first_freq: Vec<f64> = first.iter().map(|&c| c as f64 / n).collect();
    let first_freq_se = first_freq.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
    Ok(EmpiricalSummary {
        seed: cfg.seed,
        trials: cfg.trials,
        group_counts: m.counts(),
        first_freq,
        first_freq_se,
        groups: groups.iter().map(|a| a.estimate(cfg.rising_order)).collect(),
        total: total.estimate(cfg.rising_order),
        samples: (cfg.retain != Retain::None).then_some(samples),
    })
}
