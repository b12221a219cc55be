use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{MetricAction, WeightedTreeAction};
use crate::error::{Error, Result};
use crate::group::{rescaling_factor, GeneratorSet, ReducedWord, Representation};

/// Default absolute deviation below which a family counts as converged.
pub const DEFAULT_DEVIATION_THRESHOLD: f64 = 0.1;

/// Relative spread allowed across the last three grid points in [`limit_tree`].
const CAUCHY_WINDOW: f64 = 0.05;

/// One member of a family of actions: the unscaled action and the factor it is divided by.
#[derive(Clone)]
pub struct FamilyPoint {
    pub param: f64,
    pub action: Arc<dyn MetricAction>,
    pub factor: f64,
}

/// Orbit displacements of test words along a family, compared with a limit action.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub params: Vec<f64>,
    pub test_words: Vec<ReducedWord>,
    /// `distances[k][j] = d_k(o, w_j·o)` before rescaling.
    pub distances: Vec<Vec<f64>>,
    pub rescaled: Vec<Vec<f64>>,
    pub limit_distances: Vec<f64>,
    /// Per-parameter `max_j |rescaled − limit|`.
    pub deviations: Vec<f64>,
    /// Per-parameter `max_j |rescaled − limit| / limit`.
    pub relative_deviations: Vec<f64>,
    /// Absolute deviation at the last parameter.
    pub deviation: f64,
    pub relative_deviation: f64,
    pub threshold: f64,
    pub converged: bool,
    /// Deviations are non-increasing along the grid (within 1e-9).
    pub monotone: bool,
}

impl ConvergenceReport {
    /// CSV with columns `param, word, distance, rescaled_distance, limit_distance`.
    pub fn to_csv(&self) -> std::result::Result<String, csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["param", "word", "distance", "rescaled_distance", "limit_distance"])?;
        for (k, p) in self.params.iter().enumerate() {
            for (j, word) in self.test_words.iter().enumerate() {
                w.write_record([
                    p.to_string(),
                    word.to_string(),
                    self.distances[k][j].to_string(),
                    self.rescaled[k][j].to_string(),
                    self.limit_distances[j].to_string(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Tabulates `d_k(o, w·o)/R_k` against `d_∞(o, w·o)` for every test word and grid point.
pub fn convergence_report(
    family: &[FamilyPoint],
    limit: &dyn MetricAction,
    test_words: &[ReducedWord],
    threshold: f64,
) -> Result<ConvergenceReport> {
    if family.is_empty() || test_words.is_empty() {
        return Err(Error::InvalidParameter("convergence report needs a grid and test words".into()));
    }
    let limit_distances = test_words
        .iter()
        .map(|w| limit.displacement(w))
        .collect::<Result<Vec<_>>>()?;
    let distances = family
        .par_iter()
        .map(|pt| test_words.iter().map(|w| pt.action.displacement(w)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let rescaled: Vec<Vec<f64>> = distances
        .iter()
        .zip(family)
        .map(|(row, pt)| row.iter().map(|d| d / pt.factor).collect())
        .collect();
    let dev = |row: &Vec<f64>, relative: bool| {
        row.iter()
            .zip(&limit_distances)
            .map(|(r, l)| {
                let e = (r - l).abs();
                if relative {
                    if *l > 0.0 {
                        e / l
                    } else {
                        e
                    }
                } else {
                    e
                }
            })
            .fold(0.0, f64::max)
    };
    let deviations: Vec<f64> = rescaled.iter().map(|r| dev(r, false)).collect();
    let relative_deviations: Vec<f64> = rescaled.iter().map(|r| dev(r, true)).collect();
    let deviation = *deviations.last().expect("grid is nonempty");
    let relative_deviation = *relative_deviations.last().expect("grid is nonempty");
    let monotone = deviations.windows(2).all(|p| p[1] <= p[0] + 1e-9);
    Ok(ConvergenceReport {
        params: family.iter().map(|p| p.param).collect(),
        test_words: test_words.to_vec(),
        distances,
        rescaled,
        limit_distances,
        deviations,
        relative_deviations,
        deviation,
        relative_deviation,
        threshold,
        converged: deviation < threshold,
        monotone,
    })
}

/// Constructive limit tree of a degenerating free-group family.
///
/// Each generator gets weight `d(o_t, ρ_t(a_k) o_t)/R_t` at the last grid
/// point, where `o_t` realizes the rescaling factor `R_t`. The weights of the
/// last three grid points must agree within 5% relative spread.
pub fn limit_tree<F>(family: F, f: &GeneratorSet, grid: &[f64], tol: f64) -> Result<WeightedTreeAction>
where
    F: Fn(f64) -> Result<Representation> + Sync,
{
    if grid.len() < 3 {
        return Err(Error::InvalidParameter("limit_tree needs at least 3 grid points".into()));
    }
    let tail = &grid[grid.len() - 3..];
    let rows = tail
        .par_iter()
        .map(|&t| {
            let rho = family(t)?;
            let r = rescaling_factor(&rho, f, tol)?;
            if !(r.value > 0.0) {
                return Err(Error::NotConvergent(format!("rescaling factor vanishes at {t}")));
            }
            (1..=rho.rank() as i8)
                .map(|k| Ok(rho.eval(&ReducedWord::letter(k))?.displacement(&r.minimizer) / r.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for k in 0..rows[0].len() {
        let col = rows.iter().map(|r| r[k]);
        let (lo, hi) = col.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if (hi - lo) / hi >= CAUCHY_WINDOW {
            return Err(Error::NotConvergent(format!(
                "generator {} weight varies from {lo:.4} to {hi:.4} over the last three grid points",
                ReducedWord::letter(k as i8 + 1)
            )));
        }
    }
    WeightedTreeAction::new(rows.last().expect("three rows").clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::HyperbolicAction;
    use crate::group::Family;
    use std::f64::consts::PI;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, 4).unwrap()
    }

    fn test_words() -> Vec<ReducedWord> {
        ["a", "b", "ab", "aB", "aab"].iter().map(|s| w(s)).collect()
    }

    fn schottky_family(scale: f64) -> Vec<FamilyPoint> {
        [4.0, 8.0, 12.0, 16.0, 20.0, 24.0]
            .iter()
            .map(|&t| FamilyPoint {
                param: t,
                action: Arc::new(HyperbolicAction::new(
                    Representation::new(Family::Schottky { t, theta: PI / 2.0 }).unwrap(),
                )),
                factor: scale * t,
            })
            .collect()
    }

    #[test]
    fn constant_family_has_zero_deviation() {
        let tree = WeightedTreeAction::new(vec![1.0, 2.0]).unwrap();
        let fam: Vec<FamilyPoint> = (0..3)
            .map(|k| FamilyPoint { param: k as f64, action: Arc::new(tree.clone()), factor: 1.0 })
            .collect();
        let rep = convergence_report(&fam, &tree, &test_words(), 0.1).unwrap();
        assert_eq!(rep.deviation, 0.0);
        assert!(rep.converged && rep.monotone);
    }

    #[test]
    fn schottky_converges_to_unit_tree() {
        let tree = WeightedTreeAction::unit(2);
        let rep = convergence_report(&schottky_family(1.0), &tree, &test_words(), 0.1).unwrap();
        assert!(rep.deviation < 0.1, "{}", rep.deviation);
        assert!(rep.converged && rep.monotone);
        // oracle: perpendicular axes through i give cosh d(i, ab·i) = cosh² t
        let t: f64 = 24.0;
        let ab = t.cosh().powi(2).acosh() / t;
        assert!((rep.rescaled[5][2] - ab).abs() < 1e-9);
        assert!((rep.rescaled[5][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn misscaled_family_is_flagged() {
        let tree = WeightedTreeAction::unit(2);
        let rep = convergence_report(&schottky_family(2.0), &tree, &test_words(), 0.1).unwrap();
        assert!(!rep.converged);
        assert!((rep.relative_deviation - 0.5).abs() < 0.05, "{}", rep.relative_deviation);
        // the longest test word carries the largest absolute gap, about half its tree length
        assert!((rep.deviation - 1.5).abs() < 0.1, "{}", rep.deviation);
    }

    #[test]
    fn csv_layout() {
        let tree = WeightedTreeAction::unit(2);
        let rep = convergence_report(&schottky_family(1.0)[..2], &tree, &test_words()[..1], 0.1).unwrap();
        let csv = rep.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "param,word,distance,rescaled_distance,limit_distance");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("4,a,"));
    }

    #[test]
    fn limit_tree_of_schottky_family() {
        let fam = |t: f64| Representation::new(Family::Schottky { t, theta: PI / 2.0 });
        let grid = [16.0, 20.0, 24.0];
        let tree = limit_tree(fam, &GeneratorSet::standard(2), &grid, 1e-8).unwrap();
        for &wk in tree.weights() {
            assert!(wk > 0.9 && wk <= 1.0 + 1e-9, "{wk}");
        }
        assert!(limit_tree(fam, &GeneratorSet::standard(2), &grid[..2], 1e-8).is_err());
    }

    #[test]
    fn limit_tree_of_constant_family() {
        let fam = |_: f64| Representation::new(Family::Fricke { x: 3.0, y: 5.0 });
        let tree = limit_tree(fam, &GeneratorSet::standard(2), &[1.0, 2.0, 3.0], 1e-8).unwrap();
        assert!(tree.weights().iter().all(|w| *w > 0.0 && *w <= 1.0 + 1e-9));
    }

    #[test]
    fn limit_tree_rejects_drifting_ratios() {
        // tr A grows while tr B stays fixed, so the rescaled weight of b keeps shrinking
        let fam = |x: f64| Representation::new(Family::Fricke { x, y: 3.0 });
        let r = limit_tree(fam, &GeneratorSet::standard(2), &[3.0, 6.0, 24.0], 1e-8);
        assert!(matches!(r, Err(Error::NotConvergent(_))), "{r:?}");
    }
}
