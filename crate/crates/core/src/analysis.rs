//! Per-file and system outage probability.
//!
//! For a file cached with replication degree `t_d` on `K` edge nodes, the
//! outage event is `X_(1) + ... + X_(t_d) < T_1` where `X_(k)` are the order
//! statistics of `K` standard exponentials and `T_1 = (2^R - 1) / P`. The sum
//! equals `sum_k c_k Z_k` with `c_k = (t_d - k + 1) / (K - k + 1)` and i.i.d.
//! standard exponential `Z_k`, so for `t_d < K` it is hypoexponential with
//! distinct scales and for `t_d = K` it is Gamma(K, 1).

use serde::{Deserialize, Serialize};

use crate::divided::{
    check_distinct, divided_difference, partial_fractions, power_divided_difference,
};
use crate::error::{invalid, Error, Result};
use crate::placement::{PlacementPolicy, SystemConfig};
use crate::popularity::Popularity;

/// Bound on `(1 + sum |terms|) / cdf` beyond which the partial-fraction
/// evaluation is considered unreliable in double precision.
pub const DEFAULT_CONDITION_BOUND: f64 = 1e12;

/// Hard cap on series terms.
pub const DEFAULT_TRUNCATION: usize = 200;

/// Early-exit test: next term below this fraction of the partial sum.
pub const SERIES_REL_STOP: f64 = 1e-16;

/// A series cut at its truncation cap is still accepted when the next-term
/// bound is within this fraction of the value.
pub const SERIES_ACCEPT_REL: f64 = 1e-8;

/// Scales `c_k` of the exponential combination for replication degree `t_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionCoefficients {
    coeffs: Vec<f64>,
    k_ens: usize,
    t_d: usize,
}

impl PartitionCoefficients {
    pub fn new(k_ens: usize, t_d: usize) -> Result<Self> {
        if t_d == 0 || t_d > k_ens {
            return Err(invalid(format!(
                "replication degree {t_d} outside [1, {k_ens}]"
            )));
        }
        let coeffs = (1..=t_d)
            .map(|k| (t_d - k + 1) as f64 / (k_ens - k + 1) as f64)
            .collect();
        Ok(Self { coeffs, k_ens, t_d })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn k_ens(&self) -> usize {
        self.k_ens
    }

    pub fn t_d(&self) -> usize {
        self.t_d
    }

    /// All scales equal 1 (`t_d = K`): the Gamma branch.
    pub fn is_full(&self) -> bool {
        self.t_d == self.k_ens
    }
}

/// One per-file outage evaluation point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutageQuery {
    pub k_ens: usize,
    pub t_d: usize,
    /// Linear transmit SNR per edge node.
    pub power: f64,
    /// Target rate in bits/s/Hz.
    pub rate: f64,
}

impl OutageQuery {
    pub fn new(k_ens: usize, t_d: usize, power: f64, rate: f64) -> Result<Self> {
        let q = Self {
            k_ens,
            t_d,
            power,
            rate,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_d == 0 || self.t_d > self.k_ens {
            return Err(invalid(format!(
                "replication degree {} outside [1, {}]",
                self.t_d, self.k_ens
            )));
        }
        if self.power.is_nan() || self.power <= 0.0 {
            return Err(invalid(format!("power must be > 0, got {}", self.power)));
        }
        if !self.rate.is_finite() || self.rate <= 0.0 {
            return Err(invalid(format!(
                "rate must be finite and > 0, got {}",
                self.rate
            )));
        }
        Ok(())
    }

    /// `T_1 = (2^R - 1) / P`.
    pub fn threshold(&self) -> f64 {
        outage_threshold(self.power, self.rate)
    }
}

pub fn outage_threshold(power: f64, rate: f64) -> f64 {
    (2f64.powf(rate) - 1.0) / power
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(invalid(format!("threshold must be >= 0, got {threshold}")));
    }
    Ok(())
}

/// `P(sum_i c_i Z_i < T)` for pairwise-distinct positive scales, with the
/// default cancellation bound.
pub fn hypoexp_cdf(coeffs: &[f64], threshold: f64) -> Result<f64> {
    hypoexp_cdf_with_bound(coeffs, threshold, DEFAULT_CONDITION_BOUND)
}

/// Survival is the divided difference of `z^(n-1) e^(-T/z)` over the scales,
/// evaluated with the recursive table. Returns [`Error::PrecisionLoss`] when
/// `(1 + sum_i |w_i e^(-T/c_i)|) / cdf` exceeds `bound`.
pub fn hypoexp_cdf_with_bound(coeffs: &[f64], threshold: f64, bound: f64) -> Result<f64> {
    check_scales(coeffs)?;
    check_threshold(threshold)?;
    if threshold == 0.0 {
        return Ok(0.0);
    }
    if threshold.is_infinite() {
        return Ok(1.0);
    }
    let values = survival_kernel(coeffs, threshold);
    let survival = divided_difference(coeffs, &values)?;
    let abs_sum = partial_fractions(coeffs, &values)?.abs_sum;
    let cdf = 1.0 - survival;
    let condition = (1.0 + abs_sum) / cdf;
    if cdf <= 0.0 || condition > bound {
        return Err(Error::PrecisionLoss {
            condition: if cdf <= 0.0 { f64::INFINITY } else { condition },
            bound,
        });
    }
    Ok(cdf.clamp(0.0, 1.0))
}

/// Explicit partial-fraction evaluation `1 - sum_i w_i e^(-T/c_i)`, unguarded.
pub fn hypoexp_cdf_explicit(coeffs: &[f64], threshold: f64) -> Result<f64> {
    check_scales(coeffs)?;
    check_threshold(threshold)?;
    let values = survival_kernel(coeffs, threshold);
    Ok(1.0 - partial_fractions(coeffs, &values)?.value)
}

fn check_scales(coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(invalid("need at least one scale"));
    }
    if let Some(c) = coeffs.iter().find(|c| !c.is_finite() || **c <= 0.0) {
        return Err(invalid(format!("scales must be finite and > 0, got {c}")));
    }
    check_distinct(coeffs)
}

fn survival_kernel(coeffs: &[f64], threshold: f64) -> Vec<f64> {
    let n = coeffs.len() as i32;
    coeffs
        .iter()
        .map(|&c| c.powi(n - 1) * (-threshold / c).exp())
        .collect()
}

/// `P(X_1 + ... + X_K < T)` for i.i.d. standard exponentials, i.e. the
/// regularized lower incomplete gamma `P(K, T)`.
pub fn gamma_sum_cdf(k_ens: usize, threshold: f64) -> Result<f64> {
    if k_ens == 0 {
        return Err(invalid("shape must be >= 1"));
    }
    check_threshold(threshold)?;
    if threshold == 0.0 {
        return Ok(0.0);
    }
    if threshold.is_infinite() {
        return Ok(1.0);
    }
    if threshold < k_ens as f64 + 1.0 {
        Ok(gamma_tail_series(k_ens, threshold).min(1.0))
    } else {
        Ok(gamma_head_complement(k_ens, threshold).clamp(0.0, 1.0))
    }
}

/// `e^-T sum_{i >= K} T^i / i!`, all terms positive.
fn gamma_tail_series(k_ens: usize, threshold: f64) -> f64 {
    let mut term = (k_ens as f64 * threshold.ln() - ln_factorial(k_ens) - threshold).exp();
    let mut sum = term;
    let mut i = k_ens as f64;
    loop {
        i += 1.0;
        term *= threshold / i;
        sum += term;
        if term < f64::EPSILON * 1e-2 * sum {
            return sum;
        }
    }
}

/// `1 - e^-T sum_{i < K} T^i / i!`.
fn gamma_head_complement(k_ens: usize, threshold: f64) -> f64 {
    let mut term = 1.0;
    let mut head = 1.0;
    for i in 1..k_ens {
        term *= threshold / i as f64;
        head += term;
    }
    1.0 - (-threshold).exp() * head
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Which evaluation route produced an outage value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutageRoute {
    Hypoexponential,
    Gamma,
    Series,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageEval {
    pub value: f64,
    pub route: OutageRoute,
}

/// Closed-form per-file outage probability.
pub fn outage_closed_form(q: &OutageQuery) -> Result<f64> {
    outage_closed_form_detailed(q).map(|e| e.value)
}

/// Like [`outage_closed_form`], also reporting the route taken. Falls back to
/// the series when the partial-fraction sum is ill-conditioned.
pub fn outage_closed_form_detailed(q: &OutageQuery) -> Result<OutageEval> {
    q.validate()?;
    let threshold = q.threshold();
    if q.t_d == q.k_ens {
        return Ok(OutageEval {
            value: gamma_sum_cdf(q.k_ens, threshold)?,
            route: OutageRoute::Gamma,
        });
    }
    let pc = PartitionCoefficients::new(q.k_ens, q.t_d)?;
    match hypoexp_cdf(pc.coeffs(), threshold) {
        Ok(value) => Ok(OutageEval {
            value,
            route: OutageRoute::Hypoexponential,
        }),
        Err(Error::PrecisionLoss { .. }) => Ok(OutageEval {
            value: outage_series(q, DEFAULT_TRUNCATION)?.value,
            route: OutageRoute::Series,
        }),
        Err(e) => Err(e),
    }
}

/// `f(t_d, m) = (-1)^m / m! * [c^(t_d - 1 - m) | c_1, ..., c_{t_d}]`.
pub fn series_coefficient(k_ens: usize, t_d: usize, m: usize) -> Result<f64> {
    if t_d >= k_ens {
        return Err(invalid(format!(
            "series coefficient needs t_d < K (got t_d={t_d}, K={k_ens})"
        )));
    }
    let pc = PartitionCoefficients::new(k_ens, t_d)?;
    let dd = power_divided_difference(pc.coeffs(), t_d as i32 - 1 - m as i32)?;
    let inv_fact: f64 = (1..=m).map(|j| 1.0 / j as f64).product();
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * inv_fact * dd)
}

/// Truncated small-threshold series and its estimated truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    /// Magnitude of the first omitted term (tail bound for the gamma branch).
    pub error_bound: f64,
    /// Index of the last term included.
    pub last_term: usize,
}

/// Small-threshold expansion of the per-file outage, valid for `T_1 < 1`.
///
/// For `t_d < K` this is `-sum_{m >= t_d} f(t_d, m) T_1^m`; the lower terms
/// vanish identically. For `t_d = K` it is `e^-T_1 sum_{i >= K} T_1^i / i!`.
/// Summation stops when the next term falls below `1e-16` of the partial sum
/// or at `truncation`, whichever comes first.
pub fn outage_series(q: &OutageQuery, truncation: usize) -> Result<SeriesEval> {
    q.validate()?;
    let t_d = q.t_d;
    if truncation < t_d + 2 {
        return Err(invalid(format!(
            "truncation {truncation} must be >= t_d + 2 = {}",
            t_d + 2
        )));
    }
    let threshold = q.threshold();
    if threshold.is_nan() || threshold >= 1.0 {
        return Err(invalid(format!(
            "series path needs T_1 < 1, got {threshold}"
        )));
    }
    if threshold == 0.0 {
        return Ok(SeriesEval {
            value: 0.0,
            error_bound: 0.0,
            last_term: t_d,
        });
    }
    if t_d == q.k_ens {
        gamma_series(t_d, threshold, truncation)
    } else {
        hypoexp_series(q.k_ens, t_d, threshold, truncation)
    }
}

fn gamma_series(k: usize, threshold: f64, truncation: usize) -> Result<SeriesEval> {
    let mut term = (k as f64 * threshold.ln() - ln_factorial(k) - threshold).exp();
    let mut sum = 0.0;
    let mut i = k;
    loop {
        sum += term;
        let next = term * threshold / (i + 1) as f64;
        if next < SERIES_REL_STOP * sum || i == truncation {
            // positive terms with ratio <= T/(i+2) < 1 afterwards
            let ratio = threshold / (i + 2) as f64;
            let error_bound = next / (1.0 - ratio);
            return finish_series(sum, error_bound, i, truncation);
        }
        term = next;
        i += 1;
    }
}

fn hypoexp_series(
    k_ens: usize,
    t_d: usize,
    threshold: f64,
    truncation: usize,
) -> Result<SeriesEval> {
    let pc = PartitionCoefficients::new(k_ens, t_d)?;
    check_distinct(pc.coeffs())?;
    // -f(t_d, m) T^m = (-1)^j T^m h_j(1/c) / (m! prod c) with j = m - t_d.
    // g[i] tracks h_j(y_1..y_i) T^j t_d! / m! so nothing overflows.
    let recip: Vec<f64> = pc.coeffs().iter().map(|c| 1.0 / c).collect();
    let lead =
        (t_d as f64 * threshold.ln() - ln_factorial(t_d)).exp() * recip.iter().product::<f64>();
    let mut g = vec![1.0; t_d];
    let step = |g: &mut Vec<f64>, m: usize| {
        let scale = threshold / m as f64;
        let mut below = 0.0;
        for (gi, y) in g.iter_mut().zip(&recip) {
            *gi = below + y * scale * *gi;
            below = *gi;
        }
    };
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut m = t_d;
    loop {
        sum += sign * lead * g[t_d - 1];
        step(&mut g, m + 1);
        let next = lead * g[t_d - 1];
        if next < SERIES_REL_STOP * sum.abs() || m == truncation {
            return finish_series(sum, next, m, truncation);
        }
        sign = -sign;
        m += 1;
    }
}

fn finish_series(sum: f64, error_bound: f64, last: usize, truncation: usize) -> Result<SeriesEval> {
    if last == truncation && error_bound > SERIES_ACCEPT_REL * sum.abs() {
        return Err(Error::NonConvergence { terms: truncation });
    }
    Ok(SeriesEval {
        value: sum.clamp(0.0, 1.0),
        error_bound,
        last_term: last,
    })
}

/// Closed-form outage for every replication degree `t = 1..=K`, indexed `t - 1`.
pub fn outage_by_degree(k_ens: usize, power: f64, rate: f64) -> Result<Vec<f64>> {
    (1..=k_ens)
        .map(|t| outage_closed_form(&OutageQuery::new(k_ens, t, power, rate)?))
        .collect()
}

/// Popularity-weighted hit outage plus miss mass, from a precomputed
/// per-degree outage table.
pub fn system_outage_from_table(
    policy: &PlacementPolicy,
    pop: &Popularity,
    by_degree: &[f64],
) -> Result<f64> {
    let hit: f64 = policy
        .t()
        .iter()
        .enumerate()
        .map(|(i, &t)| pop.probs()[i] * by_degree[t - 1])
        .sum();
    Ok(hit + pop.miss_mass(policy.n0())?)
}

/// Average system outage: cache-hit transmission outage plus cache-miss mass.
pub fn system_outage(
    config: &SystemConfig,
    policy: &PlacementPolicy,
    pop: &Popularity,
    power: f64,
) -> Result<f64> {
    if pop.n_files() != config.n_files {
        return Err(invalid(format!(
            "popularity covers {} files, config has {}",
            pop.n_files(),
            config.n_files
        )));
    }
    policy.check_feasible(config)?;
    let by_degree = outage_by_degree(config.k_ens, power, config.rate)?;
    system_outage_from_table(policy, pop, &by_degree)
}

/// Negated least-squares slope of `log10(outage)` against `log10(P)`.
pub fn diversity_fit(snr_db_grid: &[f64], outage_values: &[f64]) -> Result<f64> {
    if snr_db_grid.len() != outage_values.len() {
        return Err(invalid("grid and outage lengths differ"));
    }
    if snr_db_grid.len() < 2 {
        return Err(invalid("need at least two grid points"));
    }
    if let Some(v) = outage_values.iter().find(|v| v.is_nan() || **v <= 0.0) {
        return Err(invalid(format!("outage values must be > 0, got {v}")));
    }
    let xs: Vec<f64> = snr_db_grid.iter().map(|db| db / 10.0).collect();
    let ys: Vec<f64> = outage_values.iter().map(|v| v.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("grid points must not all coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(-sxy / sxx)
}

/// Smallest replication degree among cached files (0 for an empty cache).
pub fn hit_diversity(policy: &PlacementPolicy) -> usize {
    policy.t().iter().copied().min().unwrap_or(0)
}

/// Diversity over all `n_files` files; any uncached file contributes 0.
pub fn system_diversity(policy: &PlacementPolicy, n_files: usize) -> usize {
    if policy.n0() < n_files {
        0
    } else {
        hit_diversity(policy)
    }
}

/// Per-file and system outage across an SNR grid, one policy per point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutageReport {
    pub snr_db_grid: Vec<f64>,
    /// `per_file[file][snr]`; uncached files carry outage 1.
    pub per_file: Vec<Vec<f64>>,
    pub system: Vec<f64>,
    pub policies: Vec<PlacementPolicy>,
}

impl OutageReport {
    pub fn build(
        config: &SystemConfig,
        pop: &Popularity,
        snr_db_grid: &[f64],
        policies: &[PlacementPolicy],
    ) -> Result<Self> {
        if snr_db_grid.len() != policies.len() {
            return Err(invalid("need exactly one policy per SNR point"));
        }
        let n = config.n_files;
        let mut per_file = vec![vec![0.0; snr_db_grid.len()]; n];
        let mut system = Vec::with_capacity(snr_db_grid.len());
        for (j, (&db, policy)) in snr_db_grid.iter().zip(policies).enumerate() {
            policy.check_feasible(config)?;
            let by_degree = outage_by_degree(config.k_ens, crate::db_to_linear(db), config.rate)?;
            for (d, row) in per_file.iter_mut().enumerate() {
                row[j] = policy.t().get(d).map_or(1.0, |&t| by_degree[t - 1]);
            }
            system.push(system_outage_from_table(policy, pop, &by_degree)?);
        }
        Ok(Self {
            snr_db_grid: snr_db_grid.to_vec(),
            per_file,
            system,
            policies: policies.to_vec(),
        })
    }

    /// Re-derives the system row from `per_file` and the popularity.
    pub fn recomposed_system(&self, pop: &Popularity) -> Vec<f64> {
        (0..self.snr_db_grid.len())
            .map(|j| {
                self.per_file
                    .iter()
                    .zip(pop.probs())
                    .map(|(row, p)| p * row[j])
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn partition_coefficient_examples() {
        let pc = PartitionCoefficients::new(5, 3).unwrap();
        let want = [3.0 / 5.0, 2.0 / 4.0, 1.0 / 3.0];
        for (a, b) in pc.coeffs().iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
        assert_eq!(
            PartitionCoefficients::new(4, 4).unwrap().coeffs(),
            &[1.0; 4]
        );
        assert_eq!(PartitionCoefficients::new(2, 1).unwrap().coeffs(), &[0.5]);
        assert!(PartitionCoefficients::new(3, 0).is_err());
        assert!(PartitionCoefficients::new(3, 4).is_err());
    }

    #[test]
    fn partition_coefficients_strictly_decrease_below_k() {
        for k in 2..=12 {
            for t in 1..k {
                let pc = PartitionCoefficients::new(k, t).unwrap();
                assert!(pc.coeffs().windows(2).all(|w| w[0] > w[1]));
                assert!(pc.coeffs().iter().all(|&c| c > 0.0 && c <= 1.0));
            }
        }
    }

    #[test]
    fn hypoexp_single_exponential() {
        let v = hypoexp_cdf(&[1.0], std::f64::consts::LN_2).unwrap();
        assert!(close(v, 0.5, 1e-15));
        assert_eq!(hypoexp_cdf(&[0.6, 0.5, 0.2], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn hypoexp_matches_frozen_mc_oracle() {
        // 10^7-draw MC of sum c_i Z_i < 0.7 (numpy): 0.1889456, SE 1.238e-4
        let v = hypoexp_cdf(&[3.0 / 5.0, 0.5, 1.0 / 3.0], 0.7).unwrap();
        assert!((v - 0.1889456).abs() < 3.0 * 1.237922292555716e-4);
    }

    #[test]
    fn hypoexp_table_and_explicit_agree() {
        let pc = PartitionCoefficients::new(8, 5).unwrap();
        for t in [0.05, 0.3, 1.0, 4.0] {
            let a = hypoexp_cdf(pc.coeffs(), t).unwrap();
            let b = hypoexp_cdf_explicit(pc.coeffs(), t).unwrap();
            assert!(close(a, b, 1e-10), "T={t}: {a} vs {b}");
        }
    }

    #[test]
    fn hypoexp_rejects_bad_scales() {
        assert!(matches!(
            hypoexp_cdf(&[0.5, 0.5], 1.0),
            Err(Error::CoincidentCoefficients(..))
        ));
        assert!(hypoexp_cdf(&[0.5, -0.1], 1.0).is_err());
        assert!(hypoexp_cdf(&[], 1.0).is_err());
        assert!(hypoexp_cdf(&[0.5], -1.0).is_err());
    }

    #[test]
    fn hypoexp_flags_cancellation() {
        let pc = PartitionCoefficients::new(5, 4).unwrap();
        let err = hypoexp_cdf(pc.coeffs(), 1e-5).unwrap_err();
        assert!(matches!(err, Error::PrecisionLoss { .. }));
    }

    #[test]
    fn gamma_examples() {
        for t in [0.01, 0.5, 1.0, 3.0, 20.0] {
            assert!(close(gamma_sum_cdf(1, t).unwrap(), 1.0 - (-t).exp(), 1e-15));
        }
        assert_eq!(gamma_sum_cdf(2, 0.0).unwrap(), 0.0);
        // 10^7-draw MC of Gamma(5,1) < 1 (numpy): 0.003652, SE 1.908e-5
        let v = gamma_sum_cdf(5, 1.0).unwrap();
        assert!((v - 0.003652).abs() < 3.0 * 1.907527954185731e-5);
        assert!(gamma_sum_cdf(0, 1.0).is_err());
    }

    #[test]
    fn gamma_branches_agree() {
        for k in 1..=10 {
            for t in [0.5 * k as f64, k as f64 + 1.0, 1.5 * k as f64 + 2.0] {
                let a = gamma_tail_series(k, t);
                let b = gamma_head_complement(k, t);
                assert!(close(a, b, 1e-13), "k={k}, T={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn single_node_outage() {
        for p in [0.5, 1.0, 10.0, 1000.0] {
            let q = OutageQuery::new(1, 1, p, 1.0).unwrap();
            let v = outage_closed_form(&q).unwrap();
            assert!(close(v, 1.0 - (-1.0 / p).exp(), 1e-14));
        }
    }

    #[test]
    fn closed_form_falls_back_to_series() {
        let q = OutageQuery::new(5, 4, 1e6, 1.0).unwrap();
        let eval = outage_closed_form_detailed(&q).unwrap();
        assert_eq!(eval.route, OutageRoute::Series);
        assert!(eval.value > 0.0);
        let q = OutageQuery::new(5, 2, 1.0, 1.0).unwrap();
        assert_eq!(
            outage_closed_form_detailed(&q).unwrap().route,
            OutageRoute::Hypoexponential
        );
    }

    #[test]
    fn query_validation() {
        assert!(OutageQuery::new(5, 0, 1.0, 1.0).is_err());
        assert!(OutageQuery::new(5, 6, 1.0, 1.0).is_err());
        assert!(OutageQuery::new(5, 2, 0.0, 1.0).is_err());
        assert!(OutageQuery::new(5, 2, 1.0, 0.0).is_err());
        assert!(OutageQuery::new(5, 2, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn series_leading_coefficients() {
        for k in 2..=8 {
            for t in 1..k {
                assert!(close(series_coefficient(k, t, 0).unwrap(), 1.0, 1e-10));
                for m in 1..t {
                    assert!(series_coefficient(k, t, m).unwrap().abs() < 1e-10);
                }
                assert!(series_coefficient(k, t, t).unwrap().abs() > 1e-6);
            }
        }
        assert!(series_coefficient(5, 5, 2).is_err());
    }

    #[test]
    fn series_coefficient_matches_exact_rational() {
        // exact value via Python fractions
        assert!(close(
            series_coefficient(5, 3, 3).unwrap(),
            -5.0 / 3.0,
            1e-12
        ));
    }

    #[test]
    fn series_edge_cases() {
        let q = OutageQuery::new(5, 2, f64::INFINITY, 1.0).unwrap();
        assert_eq!(outage_series(&q, 50).unwrap().value, 0.0);
        let q = OutageQuery::new(5, 2, 0.5, 1.0).unwrap();
        assert!(outage_series(&q, 50).is_err());
        let q = OutageQuery::new(5, 2, 100.0, 1.0).unwrap();
        assert!(outage_series(&q, 3).is_err());
    }

    #[test]
    fn series_gamma_branch_matches_gamma_cdf() {
        let q = OutageQuery::new(5, 5, 1e4, 1.0).unwrap();
        let s = outage_series(&q, DEFAULT_TRUNCATION).unwrap();
        let g = gamma_sum_cdf(5, q.threshold()).unwrap();
        assert!(((s.value - g) / g).abs() < 1e-9);
    }

    #[test]
    fn truncated_series_reports_nonconvergence() {
        let q = OutageQuery::new(8, 4, 1.5, 1.0).unwrap();
        assert!(matches!(
            outage_series(&q, 6),
            Err(Error::NonConvergence { terms: 6 })
        ));
    }

    #[test]
    fn diversity_fit_exact_power_law() {
        let grid = [10.0, 20.0, 30.0, 40.0];
        let vals: Vec<f64> = grid
            .iter()
            .map(|db| 0.7 * crate::db_to_linear(*db).powi(-3))
            .collect();
        assert!(close(diversity_fit(&grid, &vals).unwrap(), 3.0, 1e-9));
        assert!(diversity_fit(&grid, &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(diversity_fit(&[1.0], &[0.5]).is_err());
    }

    #[test]
    fn diversity_counts() {
        let policy = PlacementPolicy::new(vec![5, 3, 2]).unwrap();
        assert_eq!(hit_diversity(&policy), 2);
        assert_eq!(system_diversity(&policy, 10), 0);
        assert_eq!(system_diversity(&policy, 3), 2);
        let uniform = PlacementPolicy::new(vec![3; 5]).unwrap();
        assert_eq!(hit_diversity(&uniform), 3);
    }

    #[test]
    fn empty_cache_is_full_outage() {
        let config = SystemConfig::default_profile(3);
        let pop = config.popularity().unwrap();
        let empty = PlacementPolicy::new(vec![]).unwrap();
        let v = system_outage(&config, &empty, &pop, 10.0).unwrap();
        assert!(close(v, 1.0, 1e-15));
    }

    #[test]
    fn full_library_full_replication_integrates_out() {
        let mut config = SystemConfig::default_profile(10);
        config.cache_size = 10;
        let pop = config.popularity().unwrap();
        let policy = PlacementPolicy::new(vec![5; 10]).unwrap();
        let power = crate::db_to_linear(6.0);
        let v = system_outage(&config, &policy, &pop, power).unwrap();
        let per_file = outage_closed_form(&OutageQuery::new(5, 5, power, 1.0).unwrap()).unwrap();
        assert!(close(v, per_file, 1e-14));
    }

    #[test]
    fn report_recomposes_system_row() {
        let config = SystemConfig::default_profile(3);
        let pop = config.popularity().unwrap();
        let grid = [0.0, 9.0, 30.0];
        let policies = vec![
            PlacementPolicy::new(vec![4, 4, 4, 3]).unwrap(),
            PlacementPolicy::new(vec![2, 2, 2, 2, 2, 2, 1, 1, 1]).unwrap(),
            PlacementPolicy::new(vec![2, 2, 2, 2, 2, 1, 1, 1, 1, 1]).unwrap(),
        ];
        let report = OutageReport::build(&config, &pop, &grid, &policies).unwrap();
        for (a, b) in report.system.iter().zip(report.recomposed_system(&pop)) {
            assert!(close(*a, b, 1e-12));
        }
        assert!(report
            .per_file
            .iter()
            .flatten()
            .all(|v| (0.0..=1.0).contains(v)));
    }

    proptest! {
        #[test]
        fn cdfs_are_monotone_and_bounded(k in 1usize..9, t_frac in 0.0f64..1.0, a in 0.0f64..30.0, b in 0.0f64..30.0) {
            let t_d = 1 + ((k as f64 - 1.0) * t_frac).round() as usize;
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let f = |x: f64| -> f64 {
                if t_d == k {
                    gamma_sum_cdf(k, x).unwrap()
                } else {
                    let pc = PartitionCoefficients::new(k, t_d).unwrap();
                    hypoexp_cdf_with_bound(pc.coeffs(), x, f64::INFINITY).unwrap_or(0.0)
                }
            };
            let (flo, fhi) = (f(lo), f(hi));
            prop_assert!((0.0..=1.0).contains(&flo) && (0.0..=1.0).contains(&fhi));
            prop_assert!(flo <= fhi + 1e-12);
        }

        #[test]
        fn outage_decreases_in_degree_and_power(k in 2usize..9, db in -5.0f64..25.0) {
            let p = crate::db_to_linear(db);
            let vals = outage_by_degree(k, p, 1.0).unwrap();
            for w in vals.windows(2) {
                prop_assert!(w[0] > w[1], "{vals:?}");
            }
            let louder = outage_by_degree(k, p * 1.5, 1.0).unwrap();
            for (a, b) in vals.iter().zip(&louder) {
                prop_assert!(a > b);
            }
        }
    }
}
