use serde::Serialize;

use super::engine::{sample_walk, WalkConfig};
use super::entropy::EntropyEstimate;
use super::stats::{mean_and_se, Z95};
use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::group::FiniteMeasure;

/// Mean escape rate `d(o, Z_n·o)/n` over independent trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub std_error: f64,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl DriftEstimate {
    /// Aggregates per-trial endpoint distances (trial order fixed by the caller).
    pub fn from_distances(distances: &[f64], cfg: &WalkConfig) -> Self {
        let n = cfg.steps as f64;
        let rates: Vec<f64> = distances.iter().map(|d| d / n).collect();
        let (mean, se) = mean_and_se(&rates);
        Self {
            mean,
            ci_low: mean - Z95 * se,
            ci_high: mean + Z95 * se,
            std_error: se,
            steps: cfg.steps,
            trials: cfg.trials,
            seed: cfg.seed,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

pub fn estimate_drift(action: &dyn MetricAction, mu: &FiniteMeasure, cfg: &WalkConfig) -> Result<DriftEstimate> {
    Ok(DriftEstimate::from_distances(&sample_walk(action, mu, cfg)?, cfg))
}

/// `h/ℓ` with a propagated error bar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub value: f64,
    /// Uncertainty inherited from the drift interval; the entropy side is exact.
    pub error: f64,
    /// `value > 1 + error`: inconsistent with a one-dimensional boundary.
    pub exceeds_one: bool,
}

pub fn estimate_dimension(h: &EntropyEstimate, l: &DriftEstimate) -> Result<DimensionEstimate> {
    if !(l.mean > 0.0) {
        return Err(Error::InvalidParameter(format!("drift {} must be positive", l.mean)));
    }
    let value = h.extrapolated / l.mean;
    let error = value * l.half_width() / l.mean;
    Ok(DimensionEstimate { value, error, exceeds_one: value > 1.0 + error })
}
