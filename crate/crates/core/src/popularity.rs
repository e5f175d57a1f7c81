//! Zipf file popularity.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Request distribution over an `N`-file library, most popular file first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Popularity {
    probs: Vec<f64>,
    rho: f64,
}

impl Popularity {
    /// Zipf popularity `p_i = i^-rho / sum_n n^-rho`, normalizer by direct summation.
    pub fn zipf(n_files: usize, rho: f64) -> Result<Self> {
        if n_files == 0 {
            return Err(invalid("library must hold at least one file"));
        }
        if !rho.is_finite() || rho < 0.0 {
            return Err(invalid(format!(
                "zipf skewness must be finite and >= 0, got {rho}"
            )));
        }
        let weights: Vec<f64> = (1..=n_files).map(|i| (i as f64).powf(-rho)).collect();
        let norm: f64 = weights.iter().sum();
        let probs = weights.into_iter().map(|w| w / norm).collect();
        Ok(Self { probs, rho })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n_files(&self) -> usize {
        self.probs.len()
    }

    /// Probability of 1-based file index `i`.
    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i - 1]
    }

    /// Probability that the request falls outside the first `n0` files.
    pub fn miss_mass(&self, n0: usize) -> Result<f64> {
        if n0 > self.probs.len() {
            return Err(invalid(format!(
                "content diversity {n0} exceeds library size {}",
                self.probs.len()
            )));
        }
        Ok(self.probs[n0..].iter().sum())
    }

    /// 1-based file index whose cumulative mass first exceeds `u` in `[0, 1)`.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i + 1;
            }
        }
        // u landed in the rounding gap above the last partial sum
        self.probs.len()
    }
}
