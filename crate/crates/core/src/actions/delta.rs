use rand::Rng;
use rayon::prelude::*;

use super::MetricAction;
use crate::error::{Error, Result};
use crate::group::ReducedWord;

/// Symmetric matrix of orbit distances `d(u·o, v·o)` over `words`.
pub fn distance_matrix(action: &dyn MetricAction, words: &[ReducedWord]) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Result<Vec<f64>>> = (0..words.len())
        .into_par_iter()
        .map(|i| {
            (0..words.len())
                .map(|j| if i == j { Ok(0.0) } else { action.orbit_distance(&words[i], &words[j]) })
                .collect()
        })
        .collect();
    let mut m: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    // enforce exact symmetry
    for i in 0..m.len() {
        for j in 0..i {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

#[inline]
fn defect(d: &[Vec<f64>], x: usize, y: usize, z: usize, w: usize) -> f64 {
    let gp = |p: usize, q: usize| 0.5 * (d[w][p] + d[w][q] - d[p][q]);
    gp(x, y).min(gp(y, z)) - gp(x, z)
}

/// Largest sampled defect `min((x,y)_w, (y,z)_w) − (x,z)_w` over random quadruples.
///
/// This is a lower bound for the four-point constant of the orbit and is not
/// clamped at zero.
pub fn four_point_delta<R: Rng + ?Sized>(
    action: &dyn MetricAction,
    words: &[ReducedWord],
    quadruples: usize,
    rng: &mut R,
) -> Result<f64> {
    if words.len() < 4 {
        return Err(Error::InvalidParameter("four_point_delta needs at least 4 sample words".into()));
    }
    if quadruples == 0 {
        return Err(Error::InvalidParameter("quadruple count must be positive".into()));
    }
    let d = distance_matrix(action, words)?;
    let n = words.len();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..quadruples {
        let (x, y, z, w) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        best = best.max(defect(&d, x, y, z, w));
    }
    Ok(best)
}

/// Largest defect over every ordered quadruple of `words` (`n⁴` checks).
pub fn four_point_delta_exhaustive(action: &dyn MetricAction, words: &[ReducedWord]) -> Result<f64> {
    if words.len() < 4 {
        return Err(Error::InvalidParameter("four_point_delta needs at least 4 sample words".into()));
    }
    let d = distance_matrix(action, words)?;
    let n = words.len();
    let best = (0..n)
        .into_par_iter()
        .map(|w| {
            let g: Vec<f64> = (0..n * n)
                .map(|k| {
                    let (p, q) = (k / n, k % n);
                    0.5 * (d[w][p] + d[w][q] - d[p][q])
                })
                .collect();
            let mut best = f64::NEG_INFINITY;
            for x in 0..n {
                let gx = &g[x * n..(x + 1) * n];
                for y in 0..n {
                    let gxy = gx[y];
                    let gy = &g[y * n..(y + 1) * n];
                    for z in 0..n {
                        best = best.max(gxy.min(gy[z]) - gx[z]);
                    }
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{HyperbolicAction, WeightedTreeAction};
    use crate::group::{words_up_to, Family, Representation};
    use crate::hplane::{gromov_product, DEFAULT_DELTA};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tree_is_zero_hyperbolic() {
        let t = WeightedTreeAction::new(vec![1.3, 0.4]).unwrap();
        let ws = words_up_to(2, 3);
        assert!(four_point_delta_exhaustive(&t, &ws).unwrap() <= 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(four_point_delta(&t, &ws, 10_000, &mut rng).unwrap() <= 1e-12);
    }

    #[test]
    fn identical_words_give_zero() {
        let t = WeightedTreeAction::unit(2);
        let ws = vec![ReducedWord::letter(1); 4];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(four_point_delta(&t, &ws, 100, &mut rng).unwrap(), 0.0);
        assert!(four_point_delta(&t, &ws[..3], 100, &mut rng).is_err());
    }

    #[test]
    fn hyperbolic_plane_sample_respects_configured_delta() {
        let rep = Representation::new(Family::Fricke { x: 3.0, y: 3.5 }).unwrap();
        let act = HyperbolicAction::new(rep);
        let ws = words_up_to(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let est = four_point_delta(&act, &ws, 10_000, &mut rng).unwrap();
        assert!(est <= DEFAULT_DELTA);
        // oracle: recompute each quadruple's defect from points of the upper half-plane
        let pts: Vec<_> = ws
            .iter()
            .map(|w| act.representation().eval(w).unwrap().apply(&act.basepoint()).unwrap())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = ws.len();
        let mut oracle = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let (x, y, z, w) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            let gp = |p: usize, q: usize| gromov_product(&pts[p], &pts[q], &pts[w]);
            oracle = oracle.max(gp(x, y).min(gp(y, z)) - gp(x, z));
        }
        assert!((est - oracle).abs() < 1e-6, "{est} vs {oracle}");
        assert!(est > 0.0);
    }
}
