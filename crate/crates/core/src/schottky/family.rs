use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::certify::{certify, Certification};
use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::group::GeneratorSet;

/// Certification outcome at one grid parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyPointCertification {
    pub param: f64,
    pub delta: f64,
    /// `None` when the action could not be built or evaluated.
    pub certification: Option<Certification>,
    pub error: Option<String>,
}

impl FamilyPointCertification {
    pub fn is_certified(&self) -> bool {
        self.certification.as_ref().is_some_and(Certification::is_certified)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyCertification {
    pub points: Vec<FamilyPointCertification>,
    /// Every grid point certifies, so `(η, max C, min D)` works along the whole grid.
    pub uniform: bool,
    /// First grid index from which every later point certifies.
    pub certified_from: Option<usize>,
    pub eta: f64,
    /// Largest `C` over the certified tail.
    #[serde(rename = "C")]
    pub c: Option<f64>,
    /// Smallest `D` over the certified tail.
    #[serde(rename = "D")]
    pub d: Option<f64>,
}

/// Certifies a fixed set along a family of actions.
///
/// With `delta = None` each action's own hyperbolicity constant is used.
pub fn certify_family<F>(family: F, s: &GeneratorSet, delta: Option<f64>, grid: &[f64]) -> Result<FamilyCertification>
where
    F: Fn(f64) -> Result<Arc<dyn MetricAction>> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidParameter("certify_family needs a nonempty grid".into()));
    }
    let points: Vec<FamilyPointCertification> = grid
        .par_iter()
        .map(|&param| {
            let run = || -> Result<(f64, Certification)> {
                let action = family(param)?;
                let dl = delta.unwrap_or_else(|| action.delta());
                Ok((dl, certify(s, action.as_ref(), dl)?))
            };
            match run() {
                Ok((dl, c)) => FamilyPointCertification { param, delta: dl, certification: Some(c), error: None },
                Err(e) => FamilyPointCertification {
                    param,
                    delta: delta.unwrap_or(f64::NAN),
                    certification: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let tail_len = points.iter().rev().take_while(|p| p.is_certified()).count();
    let certified_from = (tail_len > 0).then(|| points.len() - tail_len);
    let tail = &points[points.len() - tail_len..];
    let certs = tail.iter().filter_map(|p| p.certification.as_ref().and_then(Certification::certificate));
    let (c, d) = certs.fold((None, None), |(c, d): (Option<f64>, Option<f64>), cert| {
        (Some(c.map_or(cert.c, |v| v.max(cert.c))), Some(d.map_or(cert.d, |v| v.min(cert.d))))
    });
    Ok(FamilyCertification {
        uniform: tail_len == points.len(),
        certified_from,
        eta: 2.0 / s.len() as f64,
        c,
        d,
        points,
    })
}
