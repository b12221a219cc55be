use serde::{Deserialize, Serialize};

use super::representation::Representation;
use super::word::ReducedWord;
use crate::error::{Error, Result};
use crate::hplane::{HPoint, ScaledIsometry};

/// Finite set of group elements, deduplicated and kept in shortlex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    elements: Vec<ReducedWord>,
}

impl GeneratorSet {
    pub fn new<I: IntoIterator<Item = ReducedWord>>(words: I) -> Self {
        let mut elements: Vec<ReducedWord> = words.into_iter().collect();
        elements.sort();
        elements.dedup();
        Self { elements }
    }

    /// `{e} ∪ {a_k^{±1}}`, the usual choice of `F`.
    pub fn standard(rank: usize) -> Self {
        Self::new(
            std::iter::once(ReducedWord::identity())
                .chain((1..=rank as i8).flat_map(|k| [ReducedWord::letter(k), ReducedWord::letter(-k)])),
        )
    }

    /// `g` together with `g⁻¹` for every given `g`.
    pub fn symmetrized<I: IntoIterator<Item = ReducedWord>>(words: I) -> Self {
        Self::new(words.into_iter().flat_map(|w| {
            let inv = w.inverse();
            [w, inv]
        }))
    }

    pub fn elements(&self) -> &[ReducedWord] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.elements
            .iter()
            .all(|w| self.elements.binary_search(&w.inverse()).is_ok())
    }

    pub fn contains_identity(&self) -> bool {
        self.elements.first().is_some_and(ReducedWord::is_identity)
    }
}

/// Minimax displacement `R = min_x max_{γ∈F} d(x, ρ(γ)x)` and where it is attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescalingResult {
    pub value: f64,
    pub minimizer: HPoint,
    /// Number of chart recenterings.
    pub iterations: usize,
    /// Spread of objective values in the final search bracket.
    pub residual: f64,
}

/// Default objective tolerance for [`rescaling_factor`].
pub const DEFAULT_RESCALING_TOL: f64 = 1e-8;

const CHART_RADIUS: f64 = 0.999;
const INTERIOR: f64 = 0.9 * CHART_RADIUS;
const MAX_ROUNDS: usize = 64;
const GOLDEN_TOL: f64 = 1e-11;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Klein-model chart centred at `center`; straight chords are geodesics.
struct KleinChart {
    center: HPoint,
}

impl KleinChart {
    fn point(&self, k1: f64, k2: f64) -> HPoint {
        let r2 = (k1 * k1 + k2 * k2).min(CHART_RADIUS * CHART_RADIUS);
        let s = 1.0 / (1.0 + (1.0 - r2).sqrt());
        let (p1, p2) = (k1 * s, k2 * s);
        // Cayley map from the disk: w = i(1 + p)/(1 − p)
        let den = (1.0 - p1) * (1.0 - p1) + p2 * p2;
        let wre = -2.0 * p2 / den;
        let wim = (1.0 - p1 * p1 - p2 * p2) / den;
        let (x, y) = (self.center.re(), self.center.im());
        HPoint::new(x + y * wre, y * wim).unwrap_or(self.center)
    }
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, value, spread)` where spread is the final value gap.
fn golden<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64, f64) {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc, fd - fc)
    } else {
        (d, fd, fc - fd)
    }
}

/// Objective `x ↦ max_γ d(x, ρ(γ)x)` for precomputed images.
fn objective(images: &[ScaledIsometry], z: &HPoint) -> f64 {
    images.iter().map(|g| g.displacement(z)).fold(0.0, f64::max)
}

/// Computes the rescaling factor of `rho` with respect to `f`.
///
/// The objective is a maximum of convex functions, hence convex along
/// geodesics and unimodal along chords of a Klein chart. A nested golden
/// section search minimizes it in a chart of radius 0.999; the chart is
/// recentred at the incumbent until the chart minimizer is interior or the
/// value plateaus.
pub fn rescaling_factor(rho: &Representation, f: &GeneratorSet, tol: f64) -> Result<RescalingResult> {
    if f.is_empty() {
        return Err(Error::InvalidParameter("generating set F is empty".into()));
    }
    if !f.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let images = f
        .elements()
        .iter()
        .map(|w| rho.eval(w))
        .collect::<Result<Vec<_>>>()?;
    minimax_displacement(&images, HPoint::I, tol)
}

/// Minimizes `max_g d(x, g·x)` over `x ∈ H`, starting from `start`.
pub fn minimax_displacement(images: &[ScaledIsometry], start: HPoint, tol: f64) -> Result<RescalingResult> {
    let mut center = start;
    let mut value = objective(images, &center);
    if images.iter().all(|g| g.approx_eq(&ScaledIsometry::identity(), 1e-14)) {
        return Ok(RescalingResult { value, minimizer: center, iterations: 0, residual: 0.0 });
    }
    for round in 1..=MAX_ROUNDS {
        let chart = KleinChart { center };
        let eval = |k1: f64, k2: f64| objective(images, &chart.point(k1, k2));
        let inner = |k1: f64| {
            let h = (CHART_RADIUS * CHART_RADIUS - k1 * k1).max(0.0).sqrt();
            golden(|k2| eval(k1, k2), -h, h, GOLDEN_TOL)
        };
        let (k1, best, spread) = golden(|k1| inner(k1).1, -CHART_RADIUS, CHART_RADIUS, GOLDEN_TOL);
        let (k2, _, inner_spread) = inner(k1);
        let candidate = chart.point(k1, k2);
        let cand_value = objective(images, &candidate);
        debug_assert!((cand_value - best).abs() <= 1e-9 * best.max(1.0));
        let improvement = value - cand_value;
        let interior = k1.hypot(k2) < INTERIOR;
        if cand_value <= value {
            center = candidate;
            value = cand_value;
        }
        let residual = spread.max(inner_spread);
        // a plateau gives no relative progress; escaping to a cusp keeps shrinking the value
        // a zero value off the chart interior only arises from cancellation near a cusp
        let plateau = value > 0.0 && improvement <= tol && improvement <= 0.5 * (value + improvement);
        if (interior || plateau) && residual <= tol {
            return Ok(RescalingResult {
                value,
                minimizer: center,
                iterations: round,
                residual: residual.max(improvement.max(0.0)),
            });
        }
    }
    Err(Error::NonConvergence { best: value, iterations: MAX_ROUNDS })
}
