use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::group::{FiniteMeasure, ReducedWord};

/// Size and seed of a Monte Carlo walk experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(steps: usize, trials: usize, seed: u64) -> Result<Self> {
        if steps == 0 || trials == 0 {
            return Err(Error::InvalidParameter(format!(
                "walks need steps >= 1 and trials >= 1 (got {steps}, {trials})"
            )));
        }
        Ok(Self { steps, trials, seed })
    }
}

/// Generator of trial `trial`: the seed picks the key, the trial index picks the stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub(crate) fn check_measure(action: &dyn MetricAction, mu: &FiniteMeasure) -> Result<()> {
    if mu.max_generator() > action.rank() {
        return Err(Error::RankMismatch { expected: action.rank(), found: mu.max_generator() });
    }
    Ok(())
}

/// Distances `d(o, Z_n·o)` at each checkpoint `n`, per trial (trials in index order).
pub fn sample_walk_at(
    action: &dyn MetricAction,
    mu: &FiniteMeasure,
    trials: usize,
    seed: u64,
    checkpoints: &[usize],
) -> Result<Vec<Vec<f64>>> {
    check_measure(action, mu)?;
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("checkpoints must be strictly increasing".into()));
    }
    let atoms: Vec<ReducedWord> = mu.support().cloned().collect();
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut walker = action.walker(&atoms)?;
            walker.reset(&ReducedWord::identity())?;
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut n = 0;
            for &c in checkpoints {
                while n < c {
                    walker.push(mu.sample_index(&mut rng))?;
                    n += 1;
                }
                out.push(walker.distance());
            }
            Ok(out)
        })
        .collect()
}

/// Final distances `d(o, Z_n·o)` per trial.
pub fn sample_walk(action: &dyn MetricAction, mu: &FiniteMeasure, cfg: &WalkConfig) -> Result<Vec<f64>> {
    Ok(sample_walk_at(action, mu, cfg.trials, cfg.seed, &[cfg.steps])?
        .into_iter()
        .map(|v| v[0])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{HyperbolicAction, WeightedTreeAction};
    use crate::group::{Family, Representation};
    use crate::hplane::HPoint;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 4).unwrap()
    }

    #[test]
    fn point_mass_walk_is_deterministic_power() {
        let rep = Representation::new(Family::Fricke { x: 3.0, y: 4.0 }).unwrap();
        let o = HPoint::new(0.5, 2.0).unwrap();
        let act = HyperbolicAction::new(rep.clone()).with_basepoint(o);
        let g = w("ab");
        let mu = FiniteMeasure::point_mass(g.clone());
        let cfg = WalkConfig::new(40, 3, 1).unwrap();
        let d = sample_walk(&act, &mu, &cfg).unwrap();
        let direct = rep.eval(&g.pow(40)).unwrap().displacement(&o);
        assert!(d.iter().all(|x| (x - direct).abs() < 1e-8));
        // n·τ ≤ d(o, gⁿo) ≤ n·τ + 2 d(o, axis)
        let tau = rep.eval(&g).unwrap().translation_length();
        let d1 = rep.eval(&g).unwrap().displacement(&o);
        let to_axis = ((0.5 * d1).sinh() / (0.5 * tau).sinh()).acosh();
        assert!(d[0] >= 40.0 * tau - 1e-8 && d[0] <= 40.0 * tau + 2.0 * to_axis + 1e-8);
    }

    #[test]
    fn identity_walk_stays_home() {
        let act = WeightedTreeAction::unit(2);
        let mu = FiniteMeasure::point_mass(ReducedWord::identity());
        let d = sample_walk(&act, &mu, &WalkConfig::new(100, 5, 0).unwrap()).unwrap();
        assert!(d.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn walk_matches_word_then_evaluate() {
        use rand::Rng;
        let rep = Representation::new(Family::Schottky { t: 3.0, theta: 1.2 }).unwrap();
        let act = HyperbolicAction::new(rep.clone());
        let mu = FiniteMeasure::new([(w("a"), 0.3), (w("B"), 0.3), (w("ab"), 0.2), (w("A"), 0.2)]).unwrap();
        let d = sample_walk_at(&act, &mu, 4, 9, &[30]).unwrap();
        for (trial, row) in d.iter().enumerate() {
            // replay the same draws and evaluate the accumulated word directly
            let mut rng = trial_rng(9, trial);
            let mut z = ReducedWord::identity();
            for _ in 0..30 {
                let u: f64 = rng.gen();
                let idx = mu
                    .atoms()
                    .iter()
                    .scan(0.0, |acc, (_, m)| {
                        *acc += m;
                        Some(*acc)
                    })
                    .position(|c| u < c)
                    .unwrap_or(mu.support_len() - 1);
                z = z.multiply(&mu.atoms()[idx].0);
            }
            let direct = rep.eval(&z).unwrap().displacement(&HPoint::I);
            assert!((row[0] - direct).abs() < 1e-8, "{} vs {direct}", row[0]);
        }
    }

    #[test]
    fn seeds_are_reproducible_and_rank_checked() {
        let act = WeightedTreeAction::unit(2);
        let mu = FiniteMeasure::uniform_generators(2);
        let cfg = WalkConfig::new(50, 20, 5).unwrap();
        assert_eq!(sample_walk(&act, &mu, &cfg).unwrap(), sample_walk(&act, &mu, &cfg).unwrap());
        let mu3 = FiniteMeasure::uniform_generators(3);
        assert!(matches!(sample_walk(&act, &mu3, &cfg), Err(Error::RankMismatch { .. })));
        assert!(WalkConfig::new(0, 1, 0).is_err());
        assert!(sample_walk_at(&act, &mu, 2, 0, &[5, 5]).is_err());
    }
}
