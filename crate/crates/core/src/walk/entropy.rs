use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteMeasure;

/// Exact entropies of the first convolution powers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// `H(Z_n)/n` for `n = 1..=n_max`.
    pub values: Vec<f64>,
    /// `H(Z_n) − H(Z_{n−1})` for `n = 1..=n_max`; non-increasing.
    pub increments: Vec<f64>,
    /// Smaller of the two final upper bounds on the asymptotic entropy.
    pub extrapolated: f64,
    pub n_max: usize,
}

/// `H(μ^{*n})` for `n ≤ n_max`, by successive convolution.
pub fn estimate_entropy(mu: &FiniteMeasure, n_max: usize, cap: usize) -> Result<EntropyEstimate> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let mut values = Vec::with_capacity(n_max);
    let mut increments = Vec::with_capacity(n_max);
    let mut power = mu.clone();
    let mut prev = 0.0;
    for n in 1..=n_max {
        if n > 1 {
            power = power.convolve(mu, cap)?;
        }
        // clamp the rounding noise of point masses
        let h = power.entropy().max(0.0);
        values.push(h / n as f64);
        increments.push(h - prev);
        prev = h;
    }
    let extrapolated = values[n_max - 1].min(increments[n_max - 1]).max(0.0);
    Ok(EntropyEstimate { values, increments, extrapolated, n_max })
}
