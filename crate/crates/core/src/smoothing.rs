//! Per-round noise: randomized rounding, single-step `t`-smoothing and
//! targeted smoothing, and the three dynamic-graph schedulers built on
//! them (background, proportional, targeted).
//!
//! The `t`-smoothing sampler is exact, not approximate: it draws a
//! toggle-set size `j` with weight `C(M, j)` over the `M = C(n,2)` edge
//! slots, toggles a uniform `j`-subset, and rejects disconnected results.
//! Toggle sets biject with graphs at Hamming distance at most `t`, so the
//! accepted draw is uniform over the connected graphs in that ball.
//! Exceeding the retry ceiling is a hard error; a silent fallback would
//! bias every statistic downstream.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{slot_count, slot_edge, Edge, Graph};
use crate::{Error, Result};

/// Retry ceiling for the rejection samplers. Inside the supported
/// regime (`t <= n/16`, connected proposals) the connected-survival
/// probability is bounded below and this is never approached.
pub const DEFAULT_MAX_RETRIES: u64 = 1_000_000;

/// Stream tag for the per-round noise draws.
pub const STREAM_NOISE: u64 = 0;

/// Seed lineage of one round's random stream. Identical lineage yields an
/// identical draw sequence, which is what makes trials reproducible and
/// order-independent under parallel execution.
#[derive(Debug, Clone)]
pub struct RoundRng {
    lineage: (u64, u64, u64, u64),
    rng: ChaCha12Rng,
}

impl RoundRng {
    pub fn new(experiment_seed: u64, trial: u64, round: u64, stream: u64) -> Self {
        let mut seed = [0u8; 32];
        seed[0..8].copy_from_slice(&experiment_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&trial.to_le_bytes());
        seed[16..24].copy_from_slice(&round.to_le_bytes());
        seed[24..32].copy_from_slice(&stream.to_le_bytes());
        RoundRng {
            lineage: (experiment_seed, trial, round, stream),
            rng: ChaCha12Rng::from_seed(seed),
        }
    }

    pub fn lineage(&self) -> (u64, u64, u64, u64) {
        self.lineage
    }
}

impl RngCore for RoundRng {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> core::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// The result of one smoothing step.
#[derive(Debug, Clone)]
pub struct NoiseOutcome {
    /// The graph the round actually communicates over; always connected.
    pub smoothed: Graph,
    /// The noise magnitude `t_i` drawn for this round (for targeted
    /// smoothing, the number of adversary changes that failed).
    pub noise_magnitude: u64,
    /// Edge slots actually flipped by the noise.
    pub toggled: Vec<Edge>,
    /// Rejection-sampling retries consumed before a connected draw.
    pub rejections: u64,
    /// True when the proportional model's cap truncated `t_i` this round.
    pub cap_bound: bool,
}

/// Randomized rounding: `⌈x⌉` with probability `x - ⌊x⌋`, else `⌊x⌋`.
/// The expectation equals `x`.
pub fn roundp_sample(x: f64, rng: &mut RoundRng) -> Result<u64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "roundp requires a non-negative input, got {x}"
        )));
    }
    let floor = libm::floor(x);
    let frac = x - floor;
    let up = frac > 0.0 && rng.gen::<f64>() < frac;
    Ok(floor as u64 + u64::from(up))
}

/// Log-weight `ln C(m, j)` as an incremental update from `ln C(m, j-1)`,
/// so the binomials never overflow even at `m ~ 10^7`.
fn log_binomial_step(m: u64, j: u64, prev: f64) -> f64 {
    prev + libm::log((m - j + 1) as f64) - libm::log(j as f64)
}

/// Draws the toggle-set size `j` with weight `C(m, j)`. Two incremental
/// passes, no allocation: C(m, j) is increasing in j for j <= m/2, so
/// normalizing by the last weight keeps the exponentials in range.
fn sample_toggle_size(m: u64, t: u64, rng: &mut RoundRng) -> u64 {
    if t == 0 {
        return 0;
    }
    // Fast path: when every C(m, j) fits comfortably in f64, work in
    // linear space with plain multiplications.
    if (t as f64) * libm::log(m as f64) < 600.0 {
        let mut w = 1.0;
        let mut total = 1.0;
        for j in 1..=t {
            w *= (m - j + 1) as f64 / j as f64;
            total += w;
        }
        let mut u = rng.gen::<f64>() * total;
        w = 1.0;
        for j in 0..=t {
            if j > 0 {
                w *= (m - j + 1) as f64 / j as f64;
            }
            if u < w {
                return j;
            }
            u -= w;
        }
        return t;
    }
    let mut lw = 0.0;
    for j in 1..=t {
        lw = log_binomial_step(m, j, lw);
    }
    let max = lw;
    let mut total = 0.0;
    lw = 0.0;
    for j in 0..=t {
        if j > 0 {
            lw = log_binomial_step(m, j, lw);
        }
        total += libm::exp(lw - max);
    }
    let mut u = rng.gen::<f64>() * total;
    lw = 0.0;
    for j in 0..=t {
        if j > 0 {
            lw = log_binomial_step(m, j, lw);
        }
        let w = libm::exp(lw - max);
        if u < w {
            return j;
        }
        u -= w;
    }
    t
}

/// Uniform sample over connected graphs at Hamming distance at most `t`
/// from the connected graph `g_adv`.
pub fn sample_t_smoothing(g_adv: &Graph, t: u64, rng: &mut RoundRng) -> Result<NoiseOutcome> {
    let m = slot_count(g_adv.n());
    if t > m {
        return Err(Error::InvalidParameter(format!(
            "noise magnitude {t} exceeds the {m} edge slots"
        )));
    }
    if t == 0 {
        return Ok(NoiseOutcome {
            smoothed: g_adv.clone(),
            noise_magnitude: 0,
            toggled: Vec::new(),
            rejections: 0,
            cap_bound: false,
        });
    }

    let mut g = g_adv.clone();
    let mut toggled = Vec::new();
    let rejections = sample_t_smoothing_in_place(&mut g, t, rng, &mut toggled)?;
    Ok(NoiseOutcome {
        smoothed: g,
        noise_magnitude: t,
        toggled,
        rejections,
        cap_bound: false,
    })
}

/// Clone-free body of [`sample_t_smoothing`]: `g` enters as the adversary
/// graph and leaves as the smoothed one; `toggled` is cleared and filled
/// with the flipped slots; the return value counts rejections. Callers
/// drawing millions of samples from the same base graph can revert the
/// toggles to reuse `g`.
pub fn sample_t_smoothing_in_place(
    g: &mut Graph,
    t: u64,
    rng: &mut RoundRng,
    toggled: &mut Vec<Edge>,
) -> Result<u64> {
    let m = slot_count(g.n());
    if t > m {
        return Err(Error::InvalidParameter(format!(
            "noise magnitude {t} exceeds the {m} edge slots"
        )));
    }
    toggled.clear();
    if t == 0 {
        return Ok(0);
    }
    let mut rejections = 0u64;
    let mut slots: Vec<u64> = Vec::new();
    loop {
        let j = sample_toggle_size(m, t, rng);
        slots.clear();
        while (slots.len() as u64) < j {
            let s = rng.gen_range(0..m);
            if !slots.contains(&s) {
                slots.push(s);
            }
        }
        slots.sort_unstable();
        toggled.clear();
        toggled.extend(slots.iter().map(|&s| slot_edge(g.n(), s)));
        for &e in toggled.iter() {
            g.toggle_edge(e);
        }
        if g.is_connected() {
            return Ok(rejections);
        }
        for &e in toggled.iter() {
            g.toggle_edge(e);
        }
        rejections += 1;
        if rejections >= DEFAULT_MAX_RETRIES {
            return Err(Error::SamplerStarvation { retries: rejections });
        }
    }
}

/// Targeted smoothing of `g_adv` with respect to `g_old`: every edge the
/// adversary changed is independently reverted with probability `epsilon`;
/// a disconnected result discards the whole draw and repeats.
pub fn sample_targeted_smoothing(
    g_adv: &Graph,
    g_old: &Graph,
    epsilon: f64,
    rng: &mut RoundRng,
) -> Result<NoiseOutcome> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "targeted epsilon must lie in [0,1], got {epsilon}"
        )));
    }
    let diff = g_old.symmetric_difference(g_adv)?;
    if diff.is_empty() || epsilon == 0.0 {
        return Ok(NoiseOutcome {
            smoothed: g_adv.clone(),
            noise_magnitude: 0,
            toggled: Vec::new(),
            rejections: 0,
            cap_bound: false,
        });
    }

    let mut g = g_adv.clone();
    let mut rejections = 0u64;
    loop {
        let mut toggled = Vec::new();
        for &e in &diff {
            if rng.gen::<f64>() < epsilon {
                g.toggle_edge(e);
                toggled.push(e);
            }
        }
        if g.is_connected() {
            let magnitude = toggled.len() as u64;
            return Ok(NoiseOutcome {
                smoothed: g,
                noise_magnitude: magnitude,
                toggled,
                rejections,
                cap_bound: false,
            });
        }
        for &e in &toggled {
            g.toggle_edge(e);
        }
        rejections += 1;
        if rejections >= DEFAULT_MAX_RETRIES {
            return Err(Error::SamplerStarvation { retries: rejections });
        }
    }
}

/// One round of the background-noise model: `t_i = roundp(k)`, redrawn
/// fresh every round, then `t_i`-smoothing of the proposal.
pub fn next_k_smoothed(g_adv: &Graph, k: f64, rng: &mut RoundRng) -> Result<NoiseOutcome> {
    let t = roundp_sample(k, rng)?;
    sample_t_smoothing(g_adv, t, rng)
}

/// One round of the proportional model: `t_i = roundp(ε · churn)` with
/// churn measured against the previous *smoothed* graph, truncated at
/// `cap`. Zero churn means zero noise (the waiting game).
pub fn next_proportional(
    g_prev_smoothed: &Graph,
    g_adv: &Graph,
    epsilon: f64,
    cap: u64,
    rng: &mut RoundRng,
) -> Result<NoiseOutcome> {
    let churn = g_prev_smoothed.hamming_distance(g_adv)? as u64;
    let drawn = roundp_sample(epsilon * churn as f64, rng)?;
    let t = drawn.min(cap);
    let mut outcome = sample_t_smoothing(g_adv, t, rng)?;
    outcome.cap_bound = drawn > cap;
    Ok(outcome)
}

/// One round of the targeted model.
pub fn next_targeted(
    g_prev_smoothed: &Graph,
    g_adv: &Graph,
    epsilon: f64,
    rng: &mut RoundRng,
) -> Result<NoiseOutcome> {
    sample_targeted_smoothing(g_adv, g_prev_smoothed, epsilon, rng)
}

/// Configuration of the per-round noise process. The allowed family is
/// fixed to connected graphs throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingModel {
    /// Background noise of expected magnitude `k` per round.
    KSmooth { k: f64 },
    /// Noise proportional to the adversary's churn, truncated at `cap`.
    Proportional { epsilon: f64, cap: u64 },
    /// Each adversary change independently fails with probability `epsilon`.
    Targeted { epsilon: f64 },
}

impl SmoothingModel {
    /// Checks the model premises against a vertex count. Violations name
    /// the failed premise.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            SmoothingModel::KSmooth { k } => {
                if !(k >= 0.0) || k > n as f64 / 16.0 {
                    return Err(Error::Config(format!(
                        "k-smoothed model requires 0 <= k <= n/16; got k = {k}, n = {n}"
                    )));
                }
            }
            SmoothingModel::Proportional { epsilon, cap } => {
                if !(epsilon > 0.0 && epsilon <= 1.0) {
                    return Err(Error::Config(format!(
                        "proportional model requires epsilon in (0, 1]; got {epsilon}"
                    )));
                }
                if cap as f64 > n as f64 / 16.0 {
                    return Err(Error::Config(format!(
                        "proportional cap must not exceed n/16; got cap = {cap}, n = {n}"
                    )));
                }
            }
            SmoothingModel::Targeted { epsilon } => {
                if !(0.0..1.0).contains(&epsilon) {
                    return Err(Error::Config(format!(
                        "targeted model requires epsilon in [0, 1); got {epsilon}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Applies this model's round step to an adversary proposal.
    pub fn step(
        &self,
        g_prev_smoothed: &Graph,
        g_adv: &Graph,
        rng: &mut RoundRng,
    ) -> Result<NoiseOutcome> {
        match *self {
            SmoothingModel::KSmooth { k } => next_k_smoothed(g_adv, k, rng),
            SmoothingModel::Proportional { epsilon, cap } => {
                next_proportional(g_prev_smoothed, g_adv, epsilon, cap, rng)
            }
            SmoothingModel::Targeted { epsilon } => {
                next_targeted(g_prev_smoothed, g_adv, epsilon, rng)
            }
        }
    }
}
