//! Reproducible Monte Carlo simulation of straggling servers.
//!
//! Randomness comes from a fixed, documented generator so identical
//! `(assignment, config)` inputs produce bit-identical results on every
//! platform. Each trial's stream is a pure function of `(seed, trial_index)`,
//! so trials could be sharded across workers without changing the output.

use num::{BigUint, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::combinatorics::to_f64;
use crate::moments::{MomentReport, StragglerModel};
use crate::{Error, Result};

/// Generator identifier recorded in results.
pub const PRNG_NAME: &str = "splitmix64-counter";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream whose initial state is a mix of `(seed, counter)`.
///
/// `next = mix64(state += 0x9E3779B97F4A7C15)` with the standard finalizer
/// constants `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`.
pub struct TrialRng {
    state: u64,
}

impl TrialRng {
    pub fn new(seed: u64, counter: u64) -> Self {
        TrialRng {
            state: mix64(seed ^ mix64(counter.wrapping_mul(GOLDEN_GAMMA).wrapping_add(GOLDEN_GAMMA))),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Unbiased uniform draw in `0..bound` by rejection.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % bound;
            }
        }
    }

    /// Unbiased uniform draw in `0..bound` for arbitrary-precision bounds:
    /// rejection on `bits(bound)` random bits.
    pub fn next_biguint_below(&mut self, bound: &BigUint) -> BigUint {
        debug_assert!(!bound.is_zero());
        if let Some(b) = bound.to_u64() {
            return BigUint::from(self.next_below(b));
        }
        let bits = bound.bits();
        let words = bits.div_ceil(64) as usize;
        let top_mask = if bits.is_multiple_of(64) { u64::MAX } else { (1u64 << (bits % 64)) - 1 };
        loop {
            let mut raw: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
            raw[words - 1] &= top_mask;
            let candidate = BigUint::from_slice(
                &raw.iter()
                    .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                    .collect::<Vec<u32>>(),
            );
            if candidate < *bound {
                return candidate;
            }
        }
    }
}

/// Simulation parameters.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub model: StragglerModel,
    pub trials: u64,
    pub seed: u64,
}

/// Empirical statistics of the distinct-job count over the simulated trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub seed: u64,
    pub prng: String,
    pub model: String,
    /// `histogram[d]` = number of trials recovering exactly `d` distinct jobs.
    pub histogram: Vec<u64>,
    pub mean: f64,
    /// Unbiased sample variance (n-1 denominator).
    pub variance: f64,
    pub variance_estimator: String,
    pub se_mean: f64,
    pub se_variance: f64,
}

impl SimResult {
    /// `d,count` lines for the histogram.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("d,count\n");
        for (d, cnt) in self.histogram.iter().enumerate() {
            out.push_str(&format!("{d},{cnt}\n"));
        }
        out
    }
}

enum Sampler {
    Uniform(usize),
    Bernoulli { straggle_num: BigUint, den: BigUint },
    Explicit { cumulative: Vec<BigUint>, den: BigUint },
}

fn build_sampler(model: &StragglerModel, c: usize) -> Result<Sampler> {
    model.validate(c)?;
    Ok(match model {
        StragglerModel::UniformSubset(x) => Sampler::Uniform(*x),
        StragglerModel::BernoulliStraggle(p) => Sampler::Bernoulli {
            straggle_num: p.numer().magnitude().clone(),
            den: p.denom().magnitude().clone(),
        },
        StragglerModel::ExplicitX(pmf) => {
            // bring the pmf over a common denominator, then sample an integer
            // below it and walk the cumulative numerators
            let mut den = BigUint::one();
            for p in pmf {
                let d = p.denom().magnitude();
                den = num::integer::lcm(den, d.clone());
            }
            let mut cumulative = Vec::with_capacity(pmf.len());
            let mut acc = BigUint::zero();
            for p in pmf {
                if p.is_negative() {
                    return Err(Error::InvalidModel("pmf has a negative entry".into()));
                }
                let scaled = p.numer().magnitude() * (&den / p.denom().magnitude());
                acc += scaled;
                cumulative.push(acc.clone());
            }
            Sampler::Explicit { cumulative, den }
        }
    })
}

/// Runs the simulation. One trial = sample a set of reporting servers under
/// the model, then count distinct jobs across them.
///
/// Sampling procedures (all exact):
/// - uniform x-subset: partial Fisher-Yates over `0..c`, keeping the first
///   `x` slots;
/// - Bernoulli straggle `p = a/b`: server `j` straggles iff a uniform draw
///   in `0..b` lands below `a`, servers visited in index order;
/// - explicit pmf: one uniform draw below the common denominator picks `x`
///   via cumulative numerators, then the uniform-subset procedure runs.
pub fn simulate(a: &Assignment, cfg: &SimConfig) -> Result<SimResult> {
    if cfg.trials == 0 {
        return Err(Error::ParameterDomain("trials must be positive".into()));
    }
    let (n, c) = (a.n(), a.c());
    let sampler = build_sampler(&cfg.model, c)?;
    let masks = a.server_masks();
    let words = masks.first().map(|m| m.len()).unwrap_or(0);

    let mut histogram = vec![0u64; n + 1];
    let base: Vec<usize> = (0..c).collect();
    let mut perm = base.clone();
    let mut acc = vec![0u64; words];

    for trial in 0..cfg.trials {
        let mut rng = TrialRng::new(cfg.seed, trial);
        acc.iter_mut().for_each(|w| *w = 0);
        match &sampler {
            Sampler::Uniform(x) => {
                sample_subset(&mut rng, &mut perm, &base, *x);
                for &s in &perm[..*x] {
                    or_mask(&mut acc, &masks[s]);
                }
            }
            Sampler::Bernoulli { straggle_num, den } => {
                for mask in &masks {
                    let draw = rng.next_biguint_below(den);
                    if draw >= *straggle_num {
                        or_mask(&mut acc, mask);
                    }
                }
            }
            Sampler::Explicit { cumulative, den } => {
                let draw = rng.next_biguint_below(den);
                let x = cumulative.iter().position(|cum| draw < *cum).unwrap_or(c);
                sample_subset(&mut rng, &mut perm, &base, x);
                for &s in &perm[..x] {
                    or_mask(&mut acc, &masks[s]);
                }
            }
        }
        let d: usize = acc.iter().map(|w| w.count_ones() as usize).sum();
        histogram[d] += 1;
    }

    let (mean, variance, se_mean, se_variance) = histogram_stats(&histogram, cfg.trials);
    Ok(SimResult {
        trials: cfg.trials,
        seed: cfg.seed,
        prng: PRNG_NAME.to_string(),
        model: cfg.model.describe(),
        histogram,
        mean,
        variance,
        variance_estimator: "unbiased (n-1 denominator)".to_string(),
        se_mean,
        se_variance,
    })
}

fn or_mask(acc: &mut [u64], mask: &[u64]) {
    for (w, m) in acc.iter_mut().zip(mask) {
        *w |= m;
    }
}

fn sample_subset(rng: &mut TrialRng, perm: &mut [usize], base: &[usize], x: usize) {
    perm.copy_from_slice(base);
    let c = base.len();
    for i in 0..x {
        let j = i + rng.next_below((c - i) as u64) as usize;
        perm.swap(i, j);
    }
}

fn histogram_stats(histogram: &[u64], trials: u64) -> (f64, f64, f64, f64) {
    let nf = trials as f64;
    let mean = histogram
        .iter()
        .enumerate()
        .map(|(d, &cnt)| d as f64 * cnt as f64)
        .sum::<f64>()
        / nf;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for (d, &cnt) in histogram.iter().enumerate() {
        let dev = d as f64 - mean;
        m2 += dev * dev * cnt as f64;
        m4 += dev * dev * dev * dev * cnt as f64;
    }
    m2 /= nf;
    m4 /= nf;
    if trials < 2 {
        return (mean, 0.0, 0.0, 0.0);
    }
    let variance = m2 * nf / (nf - 1.0);
    let se_mean = (variance / nf).sqrt();
    // asymptotic variance of the sample variance
    let var_of_var = (m4 - m2 * m2 * (nf - 3.0) / (nf - 1.0)) / nf;
    let se_variance = var_of_var.max(0.0).sqrt();
    (mean, variance, se_mean, se_variance)
}

/// z-scores of the empirical moments against exact values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Comparison {
    pub exact_mean: String,
    pub exact_variance: String,
    pub z_mean: f64,
    pub z_variance: f64,
    /// Some |z| exceeded 5.
    pub flagged: bool,
    /// Zero standard error with a nonzero discrepancy: the values disagree
    /// exactly, no statistics involved.
    pub hard_failure: bool,
}

/// Compares exact moments against a simulation: `z = (empirical - exact)/SE`.
pub fn compare(exact: &MomentReport, sim: &SimResult) -> Comparison {
    let exact_mean = to_f64(&exact.mean);
    let exact_var = to_f64(&exact.variance);
    let mut hard = false;
    let mut z = |empirical: f64, target: f64, se: f64| -> f64 {
        if se == 0.0 {
            if empirical == target {
                0.0
            } else {
                hard = true;
                f64::INFINITY
            }
        } else {
            (empirical - target) / se
        }
    };
    let z_mean = z(sim.mean, exact_mean, sim.se_mean);
    let z_variance = z(sim.variance, exact_var, sim.se_variance);
    let flagged = z_mean.abs() > 5.0 || z_variance.abs() > 5.0;
    Comparison {
        exact_mean: crate::combinatorics::rational_string(&exact.mean),
        exact_variance: crate::combinatorics::rational_string(&exact.variance),
        z_mean,
        z_variance,
        flagged,
        hard_failure: hard,
    }
}
