//! Cache placement: policies, the integer program over `(N_0, {t_i})`, and
//! the full-cooperation reference family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{outage_by_degree, system_outage_from_table};
use crate::error::{invalid, Error, Result};
use crate::popularity::Popularity;

/// Network parameters shared by every SNR point of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of edge nodes `K`.
    pub k_ens: usize,
    /// Library size `N`.
    pub n_files: usize,
    /// Per-node cache size `M`, in files.
    pub cache_size: usize,
    /// Zipf skewness.
    pub rho: f64,
    /// Target rate `R` in bits/s/Hz.
    pub rate: f64,
}

impl SystemConfig {
    /// `K = 5`, `N = 10`, `rho = 0.8`, `R = 1` with the given cache size.
    pub fn default_profile(cache_size: usize) -> Self {
        Self {
            k_ens: 5,
            n_files: 10,
            cache_size,
            rho: 0.8,
            rate: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_ens == 0 {
            return Err(Error::Config("need at least one edge node".into()));
        }
        if self.cache_size == 0 || self.cache_size >= self.n_files {
            return Err(Error::Config(format!(
                "cache size must satisfy 1 <= M < N (M={}, N={})",
                self.cache_size, self.n_files
            )));
        }
        if !self.rho.is_finite() || self.rho < 0.0 {
            return Err(Error::Config(format!(
                "rho must be finite and >= 0, got {}",
                self.rho
            )));
        }
        if !self.rate.is_finite() || self.rate <= 0.0 {
            return Err(Error::Config(format!(
                "rate must be finite and > 0, got {}",
                self.rate
            )));
        }
        Ok(())
    }

    pub fn popularity(&self) -> Result<Popularity> {
        Popularity::zipf(self.n_files, self.rho)
    }

    /// Total replication units `M * K` available across the edge.
    pub fn budget(&self) -> usize {
        self.cache_size * self.k_ens
    }
}

/// Content diversity `N_0 = t.len()` and replication degrees `t_1..t_{N_0}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolicyRepr", into = "PolicyRepr")]
pub struct PlacementPolicy {
    t: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PolicyRepr {
    n0: usize,
    t: Vec<usize>,
}

impl TryFrom<PolicyRepr> for PlacementPolicy {
    type Error = Error;

    fn try_from(r: PolicyRepr) -> Result<Self> {
        if r.n0 != r.t.len() {
            return Err(invalid(format!(
                "n0={} but {} degrees given",
                r.n0,
                r.t.len()
            )));
        }
        PlacementPolicy::new(r.t)
    }
}

impl From<PlacementPolicy> for PolicyRepr {
    fn from(p: PlacementPolicy) -> Self {
        PolicyRepr {
            n0: p.t.len(),
            t: p.t,
        }
    }
}

impl PlacementPolicy {
    /// Canonical policy: degrees >= 1 and nonincreasing.
    pub fn new(t: Vec<usize>) -> Result<Self> {
        let p = Self::unordered(t)?;
        if !p.is_canonical() {
            return Err(invalid(format!("degrees must be nonincreasing: {:?}", p.t)));
        }
        Ok(p)
    }

    /// Any order of degrees; only used by the unpruned search.
    pub fn unordered(t: Vec<usize>) -> Result<Self> {
        if t.contains(&0) {
            return Err(invalid(format!("degrees must be >= 1: {t:?}")));
        }
        Ok(Self { t })
    }

    pub fn n0(&self) -> usize {
        self.t.len()
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    pub fn is_canonical(&self) -> bool {
        self.t.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn units(&self) -> usize {
        self.t.iter().sum()
    }

    /// Degrees padded with zeros to `n_files` entries.
    pub fn padded(&self, n_files: usize) -> Vec<usize> {
        let mut v = self.t.clone();
        v.resize(n_files.max(v.len()), 0);
        v
    }

    pub fn check_feasible(&self, config: &SystemConfig) -> Result<()> {
        if self.n0() > config.n_files {
            return Err(Error::Infeasible(format!(
                "N_0={} exceeds library size {}",
                self.n0(),
                config.n_files
            )));
        }
        if let Some(t) = self.t.iter().find(|&&t| t > config.k_ens) {
            return Err(Error::Infeasible(format!(
                "degree {t} exceeds K={}",
                config.k_ens
            )));
        }
        if self.units() > config.budget() {
            return Err(Error::Infeasible(format!(
                "sum t_i = {} exceeds M*K = {}",
                self.units(),
                config.budget()
            )));
        }
        Ok(())
    }
}

/// Depth-first walk over degree vectors with `1 <= N_0 <= N`, entries in
/// `[1, K]` and `sum t_i <= M K`. With `ordered`, each prefix is capped by
/// its last entry so only nonincreasing vectors are produced.
#[derive(Clone, Debug)]
pub struct PolicyIter {
    k_ens: usize,
    n_files: usize,
    budget: usize,
    ordered: bool,
    current: Vec<usize>,
    sum: usize,
    done: bool,
}

impl PolicyIter {
    fn new(config: &SystemConfig, ordered: bool) -> Self {
        Self {
            k_ens: config.k_ens,
            n_files: config.n_files,
            budget: config.budget(),
            ordered,
            current: Vec::new(),
            sum: 0,
            done: config.k_ens == 0,
        }
    }
}

impl Iterator for PolicyIter {
    type Item = PlacementPolicy;

    fn next(&mut self) -> Option<PlacementPolicy> {
        if self.done {
            return None;
        }
        if self.current.len() < self.n_files && self.sum < self.budget {
            let cap = match (self.ordered, self.current.last()) {
                (true, Some(&last)) => last,
                _ => self.k_ens,
            };
            let v = cap.min(self.budget - self.sum);
            self.current.push(v);
            self.sum += v;
            return Some(PlacementPolicy {
                t: self.current.clone(),
            });
        }
        while let Some(v) = self.current.pop() {
            self.sum -= v;
            if v > 1 {
                self.current.push(v - 1);
                self.sum += v - 1;
                return Some(PlacementPolicy {
                    t: self.current.clone(),
                });
            }
        }
        self.done = true;
        None
    }
}

/// Every budget-feasible canonical policy, each exactly once.
pub fn enumerate_policies(config: &SystemConfig) -> PolicyIter {
    PolicyIter::new(config, true)
}

/// Every budget-feasible degree vector including all orderings.
pub fn enumerate_all_orderings(config: &SystemConfig) -> PolicyIter {
    PolicyIter::new(config, false)
}

/// Policies whose degrees are all `1` or `K` (full-cooperation reference family).
pub fn enumerate_full_cooperation(config: &SystemConfig) -> impl Iterator<Item = PlacementPolicy> {
    let k = config.k_ens;
    let n = config.n_files;
    let budget = config.budget();
    (0..=n).flat_map(move |full| {
        (0..=n - full).filter_map(move |single| {
            let n0 = full + single;
            // with K = 1 both kinds coincide, keep the all-"full" split only
            if n0 == 0 || full * k + single > budget || (k == 1 && single > 0) {
                return None;
            }
            let mut t = vec![k; full];
            t.resize(n0, 1);
            Some(PlacementPolicy { t })
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchMode {
    /// Nonincreasing degree vectors only.
    #[default]
    Pruned,
    /// Every ordering; exponential in `N`.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: PlacementPolicy,
    pub objective: f64,
    pub explored: usize,
    /// Linear SNR of the evaluation point.
    pub power: f64,
}

/// Relative window inside which two objectives count as tied.
pub const TIE_REL_TOL: f64 = 1e-15;

fn prefer(candidate: &PlacementPolicy, incumbent: &PlacementPolicy) -> bool {
    (candidate.n0(), candidate.t()) > (incumbent.n0(), incumbent.t())
}

/// Minimizes the system outage over `candidates`; objective-tied policies
/// resolve to larger `N_0`, then lexicographically larger degrees.
pub fn optimize_over<I>(
    config: &SystemConfig,
    power: f64,
    candidates: I,
) -> Result<OptimizationResult>
where
    I: IntoIterator<Item = PlacementPolicy>,
{
    config.validate()?;
    let pop = config.popularity()?;
    let by_degree = outage_by_degree(config.k_ens, power, config.rate)?;
    let mut best: Option<(PlacementPolicy, f64)> = None;
    let mut explored = 0;
    for policy in candidates {
        explored += 1;
        let objective = system_outage_from_table(&policy, &pop, &by_degree)?;
        let replace = match &best {
            None => true,
            Some((incumbent, value)) => {
                if (objective - value).abs() <= TIE_REL_TOL * value.abs() {
                    prefer(&policy, incumbent)
                } else {
                    objective < *value
                }
            }
        };
        if replace {
            best = Some((policy, objective));
        }
    }
    let (best, objective) = best.ok_or_else(|| invalid("no feasible policy"))?;
    Ok(OptimizationResult {
        best,
        objective,
        explored,
        power,
    })
}

pub fn optimize_placement(config: &SystemConfig, power: f64) -> Result<OptimizationResult> {
    optimize_placement_with(config, power, SearchMode::Pruned)
}

pub fn optimize_placement_with(
    config: &SystemConfig,
    power: f64,
    mode: SearchMode,
) -> Result<OptimizationResult> {
    match mode {
        SearchMode::Pruned => optimize_over(config, power, enumerate_policies(config)),
        SearchMode::Full => optimize_over(config, power, enumerate_all_orderings(config)),
    }
}

/// One optimization per power level, evaluated in parallel, in input order.
pub fn optimize_sweep(
    config: &SystemConfig,
    powers: &[f64],
    mode: SearchMode,
) -> Result<Vec<OptimizationResult>> {
    if powers.is_empty() {
        return Err(invalid("SNR grid is empty"));
    }
    powers
        .par_iter()
        .map(|&p| optimize_placement_with(config, p, mode))
        .collect()
}

/// Best policy per power level restricted to degrees in `{1, K}`.
pub fn full_cooperation_sweep(
    config: &SystemConfig,
    powers: &[f64],
) -> Result<Vec<OptimizationResult>> {
    if powers.is_empty() {
        return Err(invalid("SNR grid is empty"));
    }
    powers
        .par_iter()
        .map(|&p| optimize_over(config, p, enumerate_full_cooperation(config)))
        .collect()
}

/// Reference scheme outage across an SNR grid (dB), optimized within `{1, K}`.
pub fn full_cooperation_baseline(
    config: &SystemConfig,
    snr_db_grid: &[f64],
) -> Result<crate::analysis::OutageReport> {
    let powers: Vec<f64> = snr_db_grid
        .iter()
        .map(|&db| crate::db_to_linear(db))
        .collect();
    let results = full_cooperation_sweep(config, &powers)?;
    let policies: Vec<PlacementPolicy> = results.into_iter().map(|r| r.best).collect();
    crate::analysis::OutageReport::build(config, &config.popularity()?, snr_db_grid, &policies)
}

/// Hit diversity `min(M K / N_0, K)` under uniform demand with equal degrees.
pub fn uniform_demand_hit_diversity(config: &SystemConfig, n0: usize) -> Result<f64> {
    if n0 == 0 || n0 > config.n_files {
        return Err(invalid(format!(
            "N_0 must lie in [1, {}], got {n0}",
            config.n_files
        )));
    }
    let k = config.k_ens as f64;
    Ok((config.cache_size as f64 * k / n0 as f64).min(k))
}
