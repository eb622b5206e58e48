use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Z-scores raw chip payoffs with the pooled mean and standard deviation,
/// then shifts so the smallest pooled payoff maps to exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub mean: f64,
    pub stddev: f64,
    /// Smallest pooled z-score.
    pub z_min: f64,
}

impl NormalizationSpec {
    pub fn fit(pooled: &[f64]) -> Result<Self> {
        if pooled.is_empty() {
            return Err(Error::Empty("no payoffs to normalize"));
        }
        if pooled.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("raw payoff"));
        }
        let n = pooled.len() as f64;
        let mean = pooled.iter().sum::<f64>() / n;
        let stddev = (pooled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        if !(stddev > 0.0) {
            return Err(Error::InvalidInput("pooled payoffs have zero spread".into()));
        }
        let min = pooled.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(NormalizationSpec {
            mean,
            stddev,
            z_min: (min - mean) / stddev,
        })
    }

    /// The constant added to z-scores.
    pub fn shift(&self) -> f64 {
        1.0 - self.z_min
    }

    pub fn apply(&self, v: f64) -> f64 {
        ((v - self.mean) / self.stddev - self.z_min) + 1.0
    }
}
