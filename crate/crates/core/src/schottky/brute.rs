use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::certify::{validate_set, SchottkyCertificate};
use crate::actions::MetricAction;
use crate::error::Result;
use crate::group::ReducedWord;

/// Comparison slack for floating-point Gromov products.
pub const BRUTE_TOL: f64 = 1e-9;

/// A witness that the certificate's constants fail the Schottky definition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchottkyViolation {
    /// 1 and 2 are the proportion conditions for `a` and `a⁻¹`, 3 is the displacement bound.
    pub condition: u8,
    pub x: ReducedWord,
    /// Second probe for conditions 1 and 2; unused (identity) for condition 3.
    pub y: ReducedWord,
    /// Proportion for conditions 1 and 2, displacement for condition 3.
    pub measured: f64,
    pub threshold: f64,
}

fn check_pair(
    cert: &SchottkyCertificate,
    action: &dyn MetricAction,
    x: &ReducedWord,
    y: &ReducedWord,
) -> Result<Vec<SchottkyViolation>> {
    let id = ReducedWord::identity();
    let el = cert.set.elements();
    let need = 1.0 - cert.eta;
    let mut out = Vec::new();
    for (condition, invert) in [(1u8, false), (2u8, true)] {
        let mut good = 0usize;
        for a in el {
            let a = if invert { a.inverse() } else { a.clone() };
            if action.gromov_product(x, &a.multiply(y), &id)? <= cert.c + BRUTE_TOL {
                good += 1;
            }
        }
        let proportion = good as f64 / el.len() as f64;
        if proportion < need - BRUTE_TOL {
            out.push(SchottkyViolation { condition, x: x.clone(), y: y.clone(), measured: proportion, threshold: need });
        }
    }
    Ok(out)
}

fn check_displacements(cert: &SchottkyCertificate, action: &dyn MetricAction) -> Result<Vec<SchottkyViolation>> {
    let mut out = Vec::new();
    for a in cert.set.elements() {
        let d = action.displacement(a)?;
        if d < cert.d - BRUTE_TOL {
            out.push(SchottkyViolation {
                condition: 3,
                x: a.clone(),
                y: ReducedWord::identity(),
                measured: d,
                threshold: cert.d,
            });
        }
    }
    Ok(out)
}

fn check_pairs(
    cert: &SchottkyCertificate,
    action: &dyn MetricAction,
    pairs: &[(&ReducedWord, &ReducedWord)],
) -> Result<Vec<SchottkyViolation>> {
    validate_set(&cert.set, action)?;
    let mut out = check_displacements(cert, action)?;
    let found = pairs
        .par_iter()
        .map(|(x, y)| check_pair(cert, action, x, y))
        .collect::<Result<Vec<_>>>()?;
    out.extend(found.into_iter().flatten());
    Ok(out)
}

/// Checks the definition on `pair_samples` probe pairs drawn uniformly from `probes`.
pub fn brute_check<R: Rng + ?Sized>(
    cert: &SchottkyCertificate,
    action: &dyn MetricAction,
    probes: &[ReducedWord],
    pair_samples: usize,
    rng: &mut R,
) -> Result<Vec<SchottkyViolation>> {
    let pairs: Vec<(&ReducedWord, &ReducedWord)> = if probes.is_empty() {
        Vec::new()
    } else {
        (0..pair_samples)
            .map(|_| (&probes[rng.gen_range(0..probes.len())], &probes[rng.gen_range(0..probes.len())]))
            .collect()
    };
    check_pairs(cert, action, &pairs)
}

/// Checks the definition on every ordered pair of probes.
pub fn brute_check_exhaustive(
    cert: &SchottkyCertificate,
    action: &dyn MetricAction,
    probes: &[ReducedWord],
) -> Result<Vec<SchottkyViolation>> {
    let pairs: Vec<_> = probes.iter().flat_map(|x| probes.iter().map(move |y| (x, y))).collect();
    check_pairs(cert, action, &pairs)
}

/// All words up to `short_len` plus `extra` uniform random reduced words of length `long_len`.
pub fn probe_words<R: Rng + ?Sized>(
    rank: usize,
    short_len: usize,
    extra: usize,
    long_len: usize,
    rng: &mut R,
) -> Vec<ReducedWord> {
    let mut out = crate::group::words_up_to(rank, short_len);
    for _ in 0..extra {
        let mut raw: Vec<i32> = Vec::with_capacity(long_len);
        while raw.len() < long_len {
            let k = rng.gen_range(1..=rank as i32);
            let l = if rng.gen::<bool>() { k } else { -k };
            if raw.last() != Some(&-l) {
                raw.push(l);
            }
        }
        out.push(crate::group::reduce(&raw, rank).expect("letters are in range"));
    }
    out
}
