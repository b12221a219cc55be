use rayon::prelude::*;
use serde::Serialize;

use super::engine::{check_measure, trial_rng};
use super::stats::quantile_type1;
use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::group::{FiniteMeasure, ReducedWord};

/// Empirical constant `E` such that `d(o, gZ_n·o) ≥ d(o, g·o) − E` for all `n ≤ horizon`
/// with probability at least `1 − ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceIncreaseEstimate {
    pub g: ReducedWord,
    pub horizon: usize,
    pub epsilon: f64,
    pub e_hat: f64,
    pub base_distance: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn check_distance_increase(
    mu: &FiniteMeasure,
    action: &dyn MetricAction,
    g: &ReducedWord,
    horizon: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<DistanceIncreaseEstimate> {
    check_measure(action, mu)?;
    if horizon == 0 || trials == 0 || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need horizon >= 1, trials >= 1 and epsilon in (0, 1) (got {horizon}, {trials}, {epsilon})"
        )));
    }
    let base = action.displacement(g)?;
    let atoms: Vec<ReducedWord> = mu.support().cloned().collect();
    let mut deficits = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut walker = action.walker(&atoms)?;
            walker.reset(g)?;
            let mut worst = 0.0f64;
            for _ in 0..horizon {
                walker.push(mu.sample_index(&mut rng))?;
                worst = worst.max(base - walker.distance());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    deficits.sort_by(f64::total_cmp);
    Ok(DistanceIncreaseEstimate {
        g: g.clone(),
        horizon,
        epsilon,
        e_hat: quantile_type1(&deficits, 1.0 - epsilon),
        base_distance: base,
        trials,
        seed,
    })
}
