use rayon::prelude::*;
use serde::Serialize;

use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, ReducedWord};

/// Constants of an `(η, C, D)`-Schottky set obtained from the finite-point criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchottkyCertificate {
    pub set: GeneratorSet,
    /// `2/#S`.
    pub eta: f64,
    /// `c1 + 3δ`.
    #[serde(rename = "C")]
    pub c: f64,
    /// `c2`.
    #[serde(rename = "D")]
    pub d: f64,
    /// Largest Gromov product `(g·o, h·o)_o` over distinct `g, h ∈ S`.
    pub c1: f64,
    /// Smallest displacement `d(o, g·o)` over `g ∈ S`.
    pub c2: f64,
    pub delta: f64,
    /// `c2/2 − c1 − 2δ`, positive for a certificate.
    pub margin: f64,
}

/// Constants of a set for which the criterion fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionFailure {
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    /// `c2/2 − c1 − 2δ ≤ 0`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Certification {
    Certified(SchottkyCertificate),
    Failed(CriterionFailure),
}

impl Certification {
    pub fn certificate(&self) -> Option<&SchottkyCertificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::Failed(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified(_))
    }

    pub fn margin(&self) -> f64 {
        match self {
            Certification::Certified(c) => c.margin,
            Certification::Failed(f) => f.margin,
        }
    }

    pub fn constants(&self) -> (f64, f64) {
        match self {
            Certification::Certified(c) => (c.c1, c.c2),
            Certification::Failed(f) => (f.c1, f.c2),
        }
    }
}

/// Applies the criterion `c1 + 2δ < c2/2` to precomputed constants.
pub fn criterion(set: GeneratorSet, c1: f64, c2: f64, delta: f64) -> Certification {
    let margin = 0.5 * c2 - c1 - 2.0 * delta;
    if margin > 0.0 {
        Certification::Certified(SchottkyCertificate {
            eta: 2.0 / set.len() as f64,
            c: c1 + 3.0 * delta,
            d: c2,
            c1,
            c2,
            delta,
            margin,
            set,
        })
    } else {
        Certification::Failed(CriterionFailure { c1, c2, delta, margin })
    }
}

pub(crate) fn validate_set(s: &GeneratorSet, action: &dyn MetricAction) -> Result<()> {
    if s.contains_identity() {
        return Err(Error::ContainsIdentity);
    }
    if s.is_empty() || !s.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    for w in s.elements() {
        w.check_rank(action.rank())?;
    }
    Ok(())
}

/// `(c1, c2)` of a set: the largest pairwise Gromov product and smallest displacement.
pub fn schottky_constants(s: &GeneratorSet, action: &dyn MetricAction) -> Result<(f64, f64)> {
    let el = s.elements();
    let disp = el.iter().map(|g| action.displacement(g)).collect::<Result<Vec<f64>>>()?;
    let c2 = disp.iter().copied().fold(f64::INFINITY, f64::min);
    let c1 = (0..el.len())
        .into_par_iter()
        .map(|i| {
            let gi = el[i].inverse();
            let mut best = f64::NEG_INFINITY;
            for j in i + 1..el.len() {
                let dij = action.displacement(&gi.multiply(&el[j]))?;
                best = best.max(0.5 * (disp[i] + disp[j] - dij));
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((c1, c2))
}

/// Certifies `S` as Schottky for an action that is `delta`-hyperbolic.
pub fn certify(s: &GeneratorSet, action: &dyn MetricAction, delta: f64) -> Result<Certification> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be non-negative")));
    }
    validate_set(s, action)?;
    let (c1, c2) = schottky_constants(s, action)?;
    Ok(criterion(s.clone(), c1, c2, delta))
}

/// `{w^m, w^{-m}}` over the given words.
pub fn power_set(words: &[ReducedWord], m: i64) -> GeneratorSet {
    GeneratorSet::symmetrized(words.iter().map(|w| w.pow(m)))
}
