use serde::Serialize;

use super::certify::{certify, Certification, SchottkyCertificate};
use crate::actions::MetricAction;
use crate::error::{Error, Result};
use crate::group::{FiniteMeasure, GeneratorSet, ReducedWord};

/// Longest atom product tried when looking for an independent pair.
pub const MAX_ATOM_PRODUCT: usize = 4;

/// Outcome of a Schottky search in the convolution powers of a measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub set: GeneratorSet,
    /// Every element of `set` is a product of exactly `n` atoms of the measure.
    pub n: usize,
    /// The independent pair, each a product of `atoms_per_base` atoms.
    pub base: (ReducedWord, ReducedWord),
    pub atoms_per_base: usize,
    /// Length of the positive words in the pair used to populate the set.
    pub block_len: usize,
    pub power: usize,
    pub certificate: SchottkyCertificate,
}

/// Distinct reduced products of exactly `k` atoms, shortlex sorted, identity dropped.
fn atom_products(atoms: &[ReducedWord], k: usize) -> Vec<ReducedWord> {
    let mut level = vec![ReducedWord::identity()];
    for _ in 0..k {
        let mut next: Vec<ReducedWord> = level.iter().flat_map(|w| atoms.iter().map(move |a| w.multiply(a))).collect();
        next.sort();
        next.dedup();
        level = next;
    }
    level.retain(|w| !w.is_identity());
    level
}

/// First independent loxodromic pair among products of `k` atoms, in shortlex order.
fn independent_pair(action: &dyn MetricAction, atoms: &[ReducedWord]) -> Result<Option<(ReducedWord, ReducedWord, usize)>> {
    for k in 1..=MAX_ATOM_PRODUCT {
        let cands = atom_products(atoms, k);
        for i in 0..cands.len() {
            for j in i + 1..cands.len() {
                match action.independent(&cands[i], &cands[j]) {
                    Ok(true) => return Ok(Some((cands[i].clone(), cands[j].clone(), k))),
                    Ok(false) => {}
                    // parabolic, elliptic or unreliable: not usable as a ping-pong player
                    Err(Error::NotLoxodromic(_) | Error::NearParabolic { .. } | Error::IdentityFixedPoints) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(None)
}

/// The first `count` positive words of length `len` in `u, v`, lexicographically with `u < v`.
fn blocks(u: &ReducedWord, v: &ReducedWord, len: usize, count: usize) -> Vec<ReducedWord> {
    (0..count as u64)
        .map(|bits| {
            (0..len).fold(ReducedWord::identity(), |w, pos| {
                let digit = (bits >> (len - 1 - pos)) & 1;
                w.multiply(if digit == 0 { u } else { v })
            })
        })
        .collect()
}

/// Builds `{w^m, w^{-m}}` from positive words `w` in an independent pair and certifies it.
///
/// The support of `μ` must be closed under inversion so that `w^{-m}` is also a
/// product of atoms; sets then lie in the support of `μ^N` with
/// `N = m · block_len · atoms_per_base`.
pub fn search(
    mu: &FiniteMeasure,
    action: &dyn MetricAction,
    delta: f64,
    eta_target: f64,
    d_target: f64,
    max_power: usize,
) -> Result<SearchResult> {
    if !(eta_target > 0.0 && eta_target < 1.0) {
        return Err(Error::InvalidParameter(format!("eta_target = {eta_target} must lie in (0, 1)")));
    }
    if max_power == 0 {
        return Err(Error::InvalidParameter("max_power must be at least 1".into()));
    }
    let atoms: Vec<ReducedWord> = mu.support().cloned().collect();
    if atoms.iter().any(|a| mu.mass(&a.inverse()) <= 0.0) {
        return Err(Error::NotSymmetric);
    }
    let (u, v, k) = independent_pair(action, &atoms)?.ok_or(Error::Elementary)?;

    // #S = 2·count ≥ 2/η
    let count = (1.0 / eta_target).ceil() as usize;
    let block_len = (count as f64).log2().ceil().max(1.0) as usize;
    let base = blocks(&u, &v, block_len, count);

    let mut best = f64::NEG_INFINITY;
    for m in 1..=max_power {
        let set = super::certify::power_set(&base, m as i64);
        match certify(&set, action, delta)? {
            Certification::Certified(cert) if cert.d >= d_target => {
                return Ok(SearchResult {
                    set,
                    n: m * block_len * k,
                    base: (u, v),
                    atoms_per_base: k,
                    block_len,
                    power: m,
                    certificate: cert,
                });
            }
            other => best = best.max(other.margin()),
        }
    }
    Err(Error::MaxPowerExceeded { max_power, best_margin: best })
}
