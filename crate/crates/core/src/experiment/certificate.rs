use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{json_file, CommandOutput, Meta, OutputFile};
use crate::actions::{MetricAction, RescaledAction};
use crate::error::{Error, Result};
use crate::schottky::{brute_check, certify_family, probe_words, search, FamilyCertification, SchottkyViolation, SearchResult};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BundleError {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for BundleError {
    fn from(e: &Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string();
        Self { kind, message: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteSummary {
    pub probes: usize,
    pub pairs: usize,
    pub violations: Vec<SchottkyViolation>,
}

/// Search result, its brute-force check, and certification along the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateBundle {
    pub search_param: f64,
    pub delta: f64,
    pub search: Option<SearchResult>,
    pub error: Option<BundleError>,
    pub brute: Option<BruteSummary>,
    pub family: Option<FamilyCertification>,
}

pub fn schottky_certify(cfg: &ExperimentConfig) -> Result<CertificateBundle> {
    let s = &cfg.schottky;
    let spec = &cfg.family.spec;
    let mu = cfg.measure()?;
    let param = s.search_param.unwrap_or(cfg.family.grid[0]);
    let action = spec.action(param)?;
    let delta = s.delta.unwrap_or_else(|| action.delta());

    let found = match search(&mu, action.as_ref(), delta, s.eta_target, s.d_target, s.max_power) {
        Ok(r) => r,
        Err(e @ (Error::Elementary | Error::MaxPowerExceeded { .. } | Error::NotSymmetric)) => {
            return Ok(CertificateBundle {
                search_param: param,
                delta,
                search: None,
                error: Some((&e).into()),
                brute: None,
                family: None,
            });
        }
        Err(e) => return Err(e),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.walk.seed);
    let probes = probe_words(spec.rank(), s.probe_len, s.probe_extra, s.probe_long_len, &mut rng);
    let violations = brute_check(&found.certificate, action.as_ref(), &probes, s.pair_samples, &mut rng)?;

    let tol = cfg.rescaling.tol;
    let family = if s.rescale_family {
        certify_family(
            |t| -> Result<Arc<dyn MetricAction>> {
                let r = spec.rescaling(t, tol)?;
                Ok(Arc::new(RescaledAction::new(spec.action(t)?, r)?))
            },
            &found.set,
            None,
            &cfg.family.grid,
        )?
    } else {
        certify_family(|t| spec.action(t), &found.set, s.delta, &cfg.family.grid)?
    };

    Ok(CertificateBundle {
        search_param: param,
        delta,
        search: Some(found),
        error: None,
        brute: Some(BruteSummary { probes: probes.len(), pairs: s.pair_samples, violations }),
        family: Some(family),
    })
}

pub fn render_schottky_certify(cfg: &ExperimentConfig, bundle: &CertificateBundle) -> CommandOutput {
    let meta = Meta::new(cfg, "schottky-certify");
    let files = vec![OutputFile {
        name: format!("{}.schottky.json", cfg.name),
        contents: json_file(&meta, bundle),
    }];
    let mut summary = Vec::new();
    if let Some(r) = &bundle.search {
        let c = &r.certificate;
        summary.push(format!(
            "certified |S| = {} at power {} (N = {}): eta = {}, C = {:.6}, D = {:.6}, margin = {:.6}",
            r.set.len(),
            r.power,
            r.n,
            c.eta,
            c.c,
            c.d,
            c.margin
        ));
    }
    if let Some(b) = &bundle.brute {
        summary.push(format!("brute-force violations over {} pairs: {}", b.pairs, b.violations.len()));
    }
    if let Some(f) = &bundle.family {
        summary.push(format!("uniform along grid: {} (certified from index {:?})", f.uniform, f.certified_from));
    }
    let failure = bundle.error.as_ref().map(|e| format!("{}: {}", e.kind, e.message));
    CommandOutput { files, summary, failure }
}
