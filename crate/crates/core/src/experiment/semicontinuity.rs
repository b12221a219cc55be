use serde::Serialize;

use super::config::{ExperimentConfig, FamilySpec};
use super::output::{json_file, CommandOutput, Meta, OutputFile};
use crate::actions::{convergence_report, limit_tree, ConvergenceReport, FamilyPoint, RescaledAction, WeightedTreeAction};
use crate::error::{Error, Result};
use crate::group::GeneratorSet;
use crate::walk::{estimate_drift, DriftEstimate, WalkConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescaledDriftRow {
    pub param: f64,
    pub r_rho: f64,
    /// Factor actually divided by (`factor_scale · R_ρ`).
    pub factor: f64,
    pub rescaled_drift: DriftEstimate,
    /// Rescaled drift minus the limit drift.
    pub difference: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityStatus {
    Holds,
    Violated,
    /// The family does not visibly converge to the limit, so no comparison is made.
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemicontinuityReport {
    pub limit_weights: Vec<f64>,
    pub limit_drift: DriftEstimate,
    pub rows: Vec<RescaledDriftRow>,
    pub tail_params: Vec<f64>,
    pub min_tail_difference: f64,
    pub drift_tolerance: f64,
    pub inequality: InequalityStatus,
    pub convergence: ConvergenceReport,
}

fn limit_of(cfg: &ExperimentConfig) -> Result<WeightedTreeAction> {
    let spec = &cfg.family.spec;
    match spec {
        FamilySpec::Tree { weights } => {
            let r = spec.rescaling(0.0, cfg.rescaling.tol)?;
            WeightedTreeAction::new(weights.iter().map(|w| w / r).collect())
        }
        _ => limit_tree(
            |t| spec.representation(t),
            &GeneratorSet::standard(spec.rank()),
            &cfg.family.grid,
            cfg.rescaling.tol,
        ),
    }
}

/// Limit tree, its drift, and rescaled drifts along the grid.
pub fn semicontinuity(cfg: &ExperimentConfig) -> Result<SemicontinuityReport> {
    let mu = cfg.measure()?;
    let wc = WalkConfig::new(cfg.walk.steps, cfg.walk.trials, cfg.walk.seed)?;
    let spec = &cfg.family.spec;
    let conv = &cfg.convergence;

    let limit = limit_of(cfg)?;
    let limit_drift = estimate_drift(&limit, &mu, &wc)?;

    let mut points = Vec::with_capacity(cfg.family.grid.len());
    let mut rows = Vec::with_capacity(cfg.family.grid.len());
    for &param in &cfg.family.grid {
        let r_rho = spec.rescaling(param, cfg.rescaling.tol)?;
        let factor = conv.factor_scale * r_rho;
        let action = spec.action(param)?;
        let rescaled = RescaledAction::new(action.clone(), factor)?;
        let rescaled_drift = estimate_drift(&rescaled, &mu, &wc)?;
        rows.push(RescaledDriftRow {
            param,
            r_rho,
            factor,
            difference: rescaled_drift.mean - limit_drift.mean,
            rescaled_drift,
        });
        points.push(FamilyPoint { param, action, factor });
    }

    let convergence = convergence_report(&points, &limit, &cfg.test_words()?, conv.threshold)?;

    let grid = &cfg.family.grid;
    let tail_params: Vec<f64> = if conv.tail.is_empty() {
        grid[grid.len().saturating_sub(3)..].to_vec()
    } else {
        conv.tail.clone()
    };
    let mut min_tail_difference = f64::INFINITY;
    for p in &tail_params {
        let row = rows
            .iter()
            .find(|r| r.param == *p)
            .ok_or_else(|| Error::Config(format!("convergence.tail entry {p} is not on the grid")))?;
        min_tail_difference = min_tail_difference.min(row.difference);
    }
    let inequality = if !convergence.converged {
        InequalityStatus::NotApplicable
    } else if min_tail_difference >= -conv.drift_tolerance {
        InequalityStatus::Holds
    } else {
        InequalityStatus::Violated
    };
    Ok(SemicontinuityReport {
        limit_weights: limit.weights().to_vec(),
        limit_drift,
        rows,
        tail_params,
        min_tail_difference,
        drift_tolerance: conv.drift_tolerance,
        inequality,
        convergence,
    })
}

pub fn render_semicontinuity(cfg: &ExperimentConfig, report: &SemicontinuityReport) -> CommandOutput {
    let meta = Meta::new(cfg, "semicontinuity");
    let mut files = vec![OutputFile {
        name: format!("{}.semicontinuity.json", cfg.name),
        contents: json_file(&meta, report),
    }];
    if let Ok(table) = report.convergence.to_csv() {
        files.push(OutputFile {
            name: format!("{}.convergence.csv", cfg.name),
            contents: meta.csv_comment() + &table,
        });
    }
    let summary = vec![
        format!("limit tree weights: {:?}", report.limit_weights),
        format!("limit drift: {:.6} ± {:.6}", report.limit_drift.mean, report.limit_drift.half_width()),
        format!("min tail difference: {:.6}", report.min_tail_difference),
        format!(
            "deviation at last parameter: {:.6} (threshold {}, converged: {})",
            report.convergence.deviation, report.convergence.threshold, report.convergence.converged
        ),
        format!("semicontinuity inequality: {:?}", report.inequality),
    ];
    CommandOutput { files, summary, failure: None }
}
