//! Isometric actions of free groups, observed through orbit distances.
//!
//! Two realizations are provided: the hyperbolic plane through a
//! [`Representation`](crate::group::Representation) ([`HyperbolicAction`]) and
//! the Cayley tree of a free group with positive edge weights
//! ([`WeightedTreeAction`]). [`RescaledAction`] divides any action's metric by
//! a constant.

mod convergence;
mod delta;
mod hyperbolic;
mod rescaled;
mod tree;

pub use convergence::{convergence_report, limit_tree, ConvergenceReport, FamilyPoint, DEFAULT_DEVIATION_THRESHOLD};
pub use delta::{distance_matrix, four_point_delta, four_point_delta_exhaustive};
pub use hyperbolic::{HyperbolicAction, RepWalker};
pub use rescaled::RescaledAction;
pub use tree::WeightedTreeAction;

use crate::error::Result;
use crate::group::ReducedWord;

/// Isometric action of a free group on a pointed Gromov-hyperbolic space.
pub trait MetricAction: Send + Sync {
    fn rank(&self) -> usize;

    /// Declared four-point hyperbolicity constant.
    fn delta(&self) -> f64;

    /// `d(u·o, v·o)`.
    fn orbit_distance(&self, u: &ReducedWord, v: &ReducedWord) -> Result<f64>;

    /// `d(o, w·o)`.
    fn displacement(&self, w: &ReducedWord) -> Result<f64> {
        self.orbit_distance(&ReducedWord::identity(), w)
    }

    /// Stable translation length `lim d(o, wⁿ·o)/n`.
    fn translation_length(&self, w: &ReducedWord) -> Result<f64>;

    /// Whether both elements act loxodromically with disjoint fixed-point pairs.
    fn independent(&self, u: &ReducedWord, v: &ReducedWord) -> Result<bool>;

    /// Incremental walker whose steps are indices into `atoms`.
    fn walker(&self, atoms: &[ReducedWord]) -> Result<Box<dyn OrbitWalker + '_>>;

    /// `(x·o, y·o)_{w·o}`.
    fn gromov_product(&self, x: &ReducedWord, y: &ReducedWord, w: &ReducedWord) -> Result<f64> {
        let dx = self.orbit_distance(w, x)?;
        let dy = self.orbit_distance(w, y)?;
        let dxy = self.orbit_distance(x, y)?;
        Ok(0.5 * (dx + dy - dxy))
    }
}

/// Tracks `d(o, Z·o)` while right-multiplying `Z` by atoms of a fixed list.
pub trait OrbitWalker {
    /// Restarts the walk at `Z = start`.
    fn reset(&mut self, start: &ReducedWord) -> Result<()>;

    /// `Z ← Z · atoms[idx]`.
    fn push(&mut self, idx: usize) -> Result<()>;

    /// Current `d(o, Z·o)`.
    fn distance(&self) -> f64;

    /// Current reduced word `Z`.
    fn word(&self) -> ReducedWord;
}

impl<T: MetricAction + ?Sized> MetricAction for std::sync::Arc<T> {
    fn rank(&self) -> usize {
        (**self).rank()
    }
    fn delta(&self) -> f64 {
        (**self).delta()
    }
    fn orbit_distance(&self, u: &ReducedWord, v: &ReducedWord) -> Result<f64> {
        (**self).orbit_distance(u, v)
    }
    fn displacement(&self, w: &ReducedWord) -> Result<f64> {
        (**self).displacement(w)
    }
    fn translation_length(&self, w: &ReducedWord) -> Result<f64> {
        (**self).translation_length(w)
    }
    fn independent(&self, u: &ReducedWord, v: &ReducedWord) -> Result<bool> {
        (**self).independent(u, v)
    }
    fn walker(&self, atoms: &[ReducedWord]) -> Result<Box<dyn OrbitWalker + '_>> {
        (**self).walker(atoms)
    }
}
