//! Outage analysis, Monte Carlo validation and cache-placement optimization for
//! partition-based edge caching over a K-node single-user Rayleigh-fading network.
//!
//! Each file `W_i` cached with replication degree `t_i` is split into `C(K, t_i)`
//! subfiles, one per `t_i`-subset of edge nodes. A requested file is delivered
//! subfile by subfile over `t_i x 1` MISO links, and is in outage when the
//! weakest subset's rate falls below the target rate.
//!
//! Modules:
//! - [`popularity`]: Zipf request distribution and cache-miss mass.
//! - [`divided`]: divided-difference engine (recursive table, partial fractions, determinants).
//! - [`analysis`]: closed-form and series outage, system outage, diversity estimates.
//! - [`montecarlo`]: reproducible stochastic oracles for all of the above.
//! - [`placement`]: placement policies, exhaustive optimizer, full-cooperation baseline.
//! - [`experiment`]: experiment specs, orchestration and CSV/JSON emission.

pub mod analysis;
pub mod divided;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod placement;
pub mod popularity;

pub use analysis::{OutageQuery, OutageReport, PartitionCoefficients};
pub use error::{Error, Result};
pub use montecarlo::McEstimate;
pub use placement::{OptimizationResult, PlacementPolicy, SystemConfig};
pub use popularity::Popularity;

/// Converts an SNR in dB to linear power (noise variance normalized to 1).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
