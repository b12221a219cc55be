use rayon::prelude::*;
use serde::Serialize;

use super::engine::{check_measure, trial_rng};
use super::stats::linear_fit;
use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::group::{pairwise_sum, FiniteMeasure, ReducedWord};

/// Least-squares fits need at least this many uncensored cells.
const MIN_FIT_CELLS: usize = 3;

/// Empirical `P(d(o, Z_n·o) ≤ a·n)` along a grid of `n`, with a log-linear fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub a: f64,
    pub n_grid: Vec<usize>,
    pub counts: Vec<usize>,
    pub probs: Vec<f64>,
    /// `ln p`, with censored cells at `ln(1/trials)`.
    pub log_probs: Vec<f64>,
    /// Cells with no hits; their log-probability is only an upper bound.
    pub censored: Vec<bool>,
    /// Negated slope of the fit over uncensored cells.
    pub kappa_hat: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    /// Mean of `d(o, Z_n·o)/n` at the largest grid point.
    pub empirical_drift: f64,
    pub trials: usize,
    pub seed: u64,
    pub warning: Option<String>,
}

/// Endpoint distances along a grid of times, shared by several tail rates.
#[derive(Clone, Debug)]
pub struct TailSamples {
    n_grid: Vec<usize>,
    /// `rows[trial][j] = d(o, Z_{n_j}·o)`.
    rows: Vec<Vec<f64>>,
    seed: u64,
    empirical_drift: f64,
}

impl TailSamples {
    pub fn collect(
        mu: &FiniteMeasure,
        action: &dyn MetricAction,
        n_grid: &[usize],
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        check_measure(action, mu)?;
        if trials == 0 || n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "tail grid must be strictly increasing positive integers and trials >= 1".into(),
            ));
        }
        let atoms: Vec<ReducedWord> = mu.support().cloned().collect();
        let rows = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, trial);
                let mut walker = action.walker(&atoms)?;
                walker.reset(&ReducedWord::identity())?;
                let mut out = Vec::with_capacity(n_grid.len());
                let mut n = 0;
                for &c in n_grid {
                    while n < c {
                        walker.push(mu.sample_index(&mut rng))?;
                        n += 1;
                    }
                    out.push(walker.distance());
                }
                Ok(out)
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let last = n_grid.len() - 1;
        let n_last = n_grid[last] as f64;
        let finals: Vec<f64> = rows.iter().map(|r| r[last] / n_last).collect();
        let empirical_drift = pairwise_sum(&finals) / trials as f64;
        Ok(Self { n_grid: n_grid.to_vec(), rows, seed, empirical_drift })
    }

    /// Mean of `d(o, Z_n·o)/n` at the largest grid time.
    pub fn empirical_drift(&self) -> f64 {
        self.empirical_drift
    }

    pub fn trials(&self) -> usize {
        self.rows.len()
    }

    pub fn estimate(&self, a: f64) -> Result<TailEstimate> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("tail rate a = {a} must be non-negative")));
        }
        let counts: Vec<usize> = self
            .n_grid
            .iter()
            .enumerate()
            .map(|(j, &n)| self.rows.iter().filter(|r| r[j] <= a * n as f64 + 1e-9).count())
            .collect();
        Ok(tail_from_counts(a, &self.n_grid, counts, self.trials(), self.seed, self.empirical_drift))
    }
}

/// Tails for several rates from one shared set of walks.
pub fn estimate_tails(
    mu: &FiniteMeasure,
    action: &dyn MetricAction,
    rates: &[f64],
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    let samples = TailSamples::collect(mu, action, n_grid, trials, seed)?;
    rates.iter().map(|&a| samples.estimate(a)).collect()
}

/// Tail for a single rate `a`.
pub fn estimate_tail(
    mu: &FiniteMeasure,
    action: &dyn MetricAction,
    a: f64,
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<TailEstimate> {
    Ok(estimate_tails(mu, action, &[a], n_grid, trials, seed)?.remove(0))
}

fn tail_from_counts(
    a: f64,
    n_grid: &[usize],
    counts: Vec<usize>,
    trials: usize,
    seed: u64,
    empirical_drift: f64,
) -> TailEstimate {
    let t = trials as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / t).collect();
    let censored: Vec<bool> = counts.iter().map(|&c| c == 0).collect();
    let log_probs: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64 / t).ln()).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = n_grid
        .iter()
        .zip(&log_probs)
        .zip(&censored)
        .filter(|(_, &c)| !c)
        .map(|((&n, &lp), _)| (n as f64, lp))
        .unzip();
    let (kappa_hat, intercept, r_squared) = if xs.len() >= MIN_FIT_CELLS {
        let (slope, icpt, r2) = linear_fit(&xs, &ys);
        // avoid reporting -0.0 for flat tails
        (Some(0.0 - slope), Some(icpt), Some(r2))
    } else {
        (None, None, None)
    };
    let warning = (a >= empirical_drift)
        .then(|| format!("rate {a} not below drift {empirical_drift:.4}; decay not expected"));
    TailEstimate {
        a,
        n_grid: n_grid.to_vec(),
        counts,
        probs,
        log_probs,
        censored,
        kappa_hat,
        intercept,
        r_squared,
        empirical_drift,
        trials,
        seed,
        warning,
    }
}
