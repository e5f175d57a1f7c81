//! Stochastic oracles for the outage formulas.
//!
//! Every trial draws from its own ChaCha8 stream selected by `(seed, trial)`,
//! so estimates are bit-identical for any thread count or chunking. Within a
//! trial the first `K` uniforms always produce the channel power gains
//! `X_k = |g_k|^2`; later draws (phases, file index) come after them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::OutageQuery;
use crate::error::{invalid, Result};
use crate::placement::{PlacementPolicy, SystemConfig};

const CHUNK: u64 = 4096;

/// Largest subset count the literal enumeration accepts.
pub const MAX_SUBSETS: u64 = 10_000;

/// Bernoulli-frequency estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Plug-in standard error `sqrt(mean (1 - mean) / trials)`.
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_count(hits: u64, trials: u64, seed: u64) -> Self {
        let mean = hits as f64 / trials as f64;
        let std_error = (mean * (1.0 - mean) / trials as f64).sqrt();
        Self {
            mean,
            std_error,
            trials,
            seed,
        }
    }

    /// Standard error of the estimator if the true probability were `p`.
    pub fn null_std_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `(mean - p) / null_std_error(p)`; 0 when both agree exactly at a
    /// degenerate `p`, infinite when they disagree there.
    pub fn z_score(&self, p: f64) -> f64 {
        let se = self.null_std_error(p);
        let diff = self.mean - p;
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Independent random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    TrialStreams::new(seed).stream(trial)
}

/// Keyed generator from which per-trial streams are cut.
#[derive(Clone)]
pub struct TrialStreams {
    base: ChaCha8Rng,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(trial);
        rng
    }
}

/// Standard exponential as `-ln U`, `U` uniform on `(0, 1]`.
pub fn std_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u = 1.0 - rng.gen::<f64>();
    -u.ln()
}

/// `K` independent CN(0,1) gains.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelDraw {
    /// `(re, im)` pairs.
    pub gains: Vec<(f64, f64)>,
}

impl ChannelDraw {
    /// Draws `|g_k|^2` as standard exponentials first, then uniform phases.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, k_ens: usize) -> Self {
        let power: Vec<f64> = (0..k_ens).map(|_| std_exponential(rng)).collect();
        let gains = power
            .into_iter()
            .map(|x| {
                let phase = std::f64::consts::TAU * rng.gen::<f64>();
                let r = x.sqrt();
                (r * phase.cos(), r * phase.sin())
            })
            .collect();
        Self { gains }
    }

    pub fn power_gains(&self) -> Vec<f64> {
        self.gains
            .iter()
            .map(|(re, im)| re * re + im * im)
            .collect()
    }
}

/// Sum of the `t` smallest of `K` fresh standard exponentials.
fn smallest_sum<R: Rng + ?Sized>(rng: &mut R, k_ens: usize, t: usize) -> f64 {
    let mut x: Vec<f64> = (0..k_ens).map(|_| std_exponential(rng)).collect();
    x.sort_by(f64::total_cmp);
    x[..t].iter().sum()
}

fn order_statistic_outage(q: &OutageQuery, streams: &TrialStreams, trial: u64) -> bool {
    let mut rng = streams.stream(trial);
    smallest_sum(&mut rng, q.k_ens, q.t_d) < q.threshold()
}

fn count_parallel<F>(trials: u64, indicator: F) -> u64
where
    F: Fn(u64) -> bool + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * CHUNK).min(trials);
            (c * CHUNK..end).filter(|&i| indicator(i)).count() as u64
        })
        .sum()
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    Ok(())
}

/// Outage frequency of `X_(1) + ... + X_(t_d) < T_1`.
pub fn mc_outage(q: &OutageQuery, trials: u64, seed: u64) -> Result<McEstimate> {
    q.validate()?;
    check_trials(trials)?;
    let streams = TrialStreams::new(seed);
    let hits = count_parallel(trials, |i| order_statistic_outage(q, &streams, i));
    Ok(McEstimate::from_count(hits, trials, seed))
}

/// Per-trial indicators of [`mc_outage`].
pub fn outage_indicators(q: &OutageQuery, trials: u64, seed: u64) -> Result<Vec<bool>> {
    q.validate()?;
    let streams = TrialStreams::new(seed);
    Ok((0..trials)
        .into_par_iter()
        .map(|i| order_statistic_outage(q, &streams, i))
        .collect())
}

/// All `t`-subsets of `0..k`, lexicographic.
pub fn subsets(k: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(start: usize, k: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..=k - (t - cur.len()) {
            cur.push(i);
            walk(i + 1, k, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if t <= k {
        walk(0, k, t, &mut Vec::with_capacity(t), &mut out);
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

struct SubsetOracle {
    subsets: Vec<Vec<usize>>,
}

impl SubsetOracle {
    fn new(q: &OutageQuery) -> Result<Self> {
        let count = binomial(q.k_ens as u64, q.t_d as u64);
        if count > MAX_SUBSETS {
            return Err(invalid(format!(
                "C({}, {}) = {count} subsets exceeds the {MAX_SUBSETS} enumeration guard",
                q.k_ens, q.t_d
            )));
        }
        Ok(Self {
            subsets: subsets(q.k_ens, q.t_d),
        })
    }

    /// Outage when the weakest subset's MISO rate falls below the target.
    fn outage(&self, q: &OutageQuery, streams: &TrialStreams, trial: u64) -> bool {
        let mut rng = streams.stream(trial);
        let x = ChannelDraw::sample(&mut rng, q.k_ens).power_gains();
        let min_rate = self
            .subsets
            .iter()
            .map(|s| (1.0 + s.iter().map(|&k| x[k]).sum::<f64>() * q.power).log2())
            .fold(f64::INFINITY, f64::min);
        min_rate < q.rate
    }
}

/// Outage by literal enumeration of every caching subset on complex gains.
pub fn mc_outage_subsets(q: &OutageQuery, trials: u64, seed: u64) -> Result<McEstimate> {
    q.validate()?;
    check_trials(trials)?;
    let oracle = SubsetOracle::new(q)?;
    let streams = TrialStreams::new(seed);
    let hits = count_parallel(trials, |i| oracle.outage(q, &streams, i));
    Ok(McEstimate::from_count(hits, trials, seed))
}

/// Per-trial indicators of [`mc_outage_subsets`].
pub fn subset_outage_indicators(q: &OutageQuery, trials: u64, seed: u64) -> Result<Vec<bool>> {
    q.validate()?;
    let oracle = SubsetOracle::new(q)?;
    let streams = TrialStreams::new(seed);
    Ok((0..trials)
        .into_par_iter()
        .map(|i| oracle.outage(q, &streams, i))
        .collect())
}

/// Ordered exponential sample built from `K` independent spacings:
/// `X_(k) = sum_{i <= k} Z_i / (K - i + 1)`.
pub fn renyi_ordered<R: Rng + ?Sized>(rng: &mut R, k_ens: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (1..=k_ens)
        .map(|i| {
            acc += std_exponential(rng) / (k_ens - i + 1) as f64;
            acc
        })
        .collect()
}

/// Ordered exponential sample by sorting `K` draws.
pub fn sorted_exponentials<R: Rng + ?Sized>(rng: &mut R, k_ens: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..k_ens).map(|_| std_exponential(rng)).collect();
    x.sort_by(f64::total_cmp);
    x
}

pub fn sample_ordered_renyi(k_ens: usize, seed: u64) -> Result<Vec<f64>> {
    if k_ens == 0 {
        return Err(invalid("need at least one edge node"));
    }
    Ok(renyi_ordered(&mut trial_rng(seed, 0), k_ens))
}

/// End-to-end system outage: random file request, then a fresh channel.
/// Requests outside the cached prefix always count as outage.
pub fn mc_system_outage(
    config: &SystemConfig,
    policy: &PlacementPolicy,
    power: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials)?;
    if power.is_nan() || power <= 0.0 {
        return Err(invalid(format!("power must be > 0, got {power}")));
    }
    policy.check_feasible(config)?;
    let pop = config.popularity()?;
    let threshold = crate::analysis::outage_threshold(power, config.rate);
    let k = config.k_ens;
    let streams = TrialStreams::new(seed);
    let hits = count_parallel(trials, |i| {
        let mut rng = streams.stream(i);
        let mut x: Vec<f64> = (0..k).map(|_| std_exponential(&mut rng)).collect();
        let d = pop.sample_index(rng.gen::<f64>());
        match policy.t().get(d - 1) {
            None => true,
            Some(&t) => {
                x.sort_by(f64::total_cmp);
                x[..t].iter().sum::<f64>() < threshold
            }
        }
    });
    Ok(McEstimate::from_count(hits, trials, seed))
}
