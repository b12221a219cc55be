use std::sync::Arc;

use super::{MetricAction, OrbitWalker};
use crate::error::{Error, Result};
use crate::group::ReducedWord;

/// The metric of `base` divided by a positive constant.
#[derive(Clone)]
pub struct RescaledAction {
    base: Arc<dyn MetricAction>,
    factor: f64,
}

impl RescaledAction {
    pub fn new(base: Arc<dyn MetricAction>, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("rescaling factor {factor} must be positive")));
        }
        Ok(Self { base, factor })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn base(&self) -> &Arc<dyn MetricAction> {
        &self.base
    }
}

impl std::fmt::Debug for RescaledAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RescaledAction").field("factor", &self.factor).finish_non_exhaustive()
    }
}

impl MetricAction for RescaledAction {
    fn rank(&self) -> usize {
        self.base.rank()
    }

    fn delta(&self) -> f64 {
        self.base.delta() / self.factor
    }

    fn orbit_distance(&self, u: &ReducedWord, v: &ReducedWord) -> Result<f64> {
        Ok(self.base.orbit_distance(u, v)? / self.factor)
    }

    fn translation_length(&self, w: &ReducedWord) -> Result<f64> {
        Ok(self.base.translation_length(w)? / self.factor)
    }

    fn independent(&self, u: &ReducedWord, v: &ReducedWord) -> Result<bool> {
        self.base.independent(u, v)
    }

    fn walker(&self, atoms: &[ReducedWord]) -> Result<Box<dyn OrbitWalker + '_>> {
        Ok(Box::new(ScaledWalker { inner: self.base.walker(atoms)?, factor: self.factor }))
    }
}

struct ScaledWalker<'a> {
    inner: Box<dyn OrbitWalker + 'a>,
    factor: f64,
}

impl OrbitWalker for ScaledWalker<'_> {
    fn reset(&mut self, start: &ReducedWord) -> Result<()> {
        self.inner.reset(start)
    }

    fn push(&mut self, idx: usize) -> Result<()> {
        self.inner.push(idx)
    }

    fn distance(&self) -> f64 {
        self.inner.distance() / self.factor
    }

    fn word(&self) -> ReducedWord {
        self.inner.word()
    }
}
