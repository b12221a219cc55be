use rayon::prelude::*;

use super::engine::{check_measure, trial_rng};
use crate::actions::{HyperbolicAction, OrbitWalker};
use crate::error::{Error, Result};
use crate::group::{FiniteMeasure, ReducedWord};
use crate::hplane::BoundaryPoint;

/// Boundary endpoint of the ray from `o` through `Z_n·o`, one per trial.
///
/// Proxy samples of the hitting measure; meaningful once `d(o, Z_n·o)` is large.
pub fn hitting_sample(
    mu: &FiniteMeasure,
    action: &HyperbolicAction,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<BoundaryPoint>> {
    check_measure(action, mu)?;
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParameter("hitting samples need n >= 1 and trials >= 1".into()));
    }
    let o = action.basepoint();
    let atoms: Vec<ReducedWord> = mu.support().cloned().collect();
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut walker = action.rep_walker(&atoms)?;
            walker.reset(&ReducedWord::identity())?;
            for _ in 0..n {
                walker.push(mu.sample_index(&mut rng))?;
            }
            // the angle is measured in the frame sending o to i
            Ok(match BoundaryPoint::from_disk_angle(walker.isometry().ray_endpoint_angle(&o)) {
                BoundaryPoint::Finite(x) => BoundaryPoint::Finite(o.re() + o.im() * x),
                BoundaryPoint::Infinity => BoundaryPoint::Infinity,
            })
        })
        .collect()
}
