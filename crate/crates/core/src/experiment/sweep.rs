use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{csv_file, json_file, num, CommandOutput, Format, Meta, OutputFile};
use crate::error::Result;
use crate::walk::{estimate_dimension, estimate_drift, estimate_entropy, DriftEstimate, EntropyEstimate, WalkConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftRow {
    pub param: f64,
    pub drift: DriftEstimate,
    pub r_rho: f64,
    pub drift_over_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowError {
    pub param: f64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftSweep {
    pub rows: Vec<DriftRow>,
    pub errors: Vec<RowError>,
}

impl DriftSweep {
    /// Consecutive rows have disjoint, increasing confidence intervals.
    pub fn strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|p| p[1].drift.ci_low > p[0].drift.ci_high)
    }
}

fn walk_config(cfg: &ExperimentConfig) -> Result<WalkConfig> {
    WalkConfig::new(cfg.walk.steps, cfg.walk.trials, cfg.walk.seed)
}

/// Drift and rescaling factor at every grid parameter; failing rows are recorded, not fatal.
pub fn drift_sweep(cfg: &ExperimentConfig) -> Result<DriftSweep> {
    let mu = cfg.measure()?;
    let wc = walk_config(cfg)?;
    let spec = &cfg.family.spec;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &param in &cfg.family.grid {
        let row = (|| -> Result<DriftRow> {
            let action = spec.action(param)?;
            let drift = estimate_drift(action.as_ref(), &mu, &wc)?;
            let r_rho = spec.rescaling(param, cfg.rescaling.tol)?;
            Ok(DriftRow { param, drift, r_rho, drift_over_r: drift.mean / r_rho })
        })();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => errors.push(RowError { param, error: e.to_string() }),
        }
    }
    Ok(DriftSweep { rows, errors })
}

fn errors_file(meta: &Meta, stem: &str, errors: &[RowError]) -> Option<OutputFile> {
    (!errors.is_empty()).then(|| OutputFile {
        name: format!("{stem}.errors.csv"),
        contents: csv_file(meta, &["param", "error"], errors.iter().map(|e| [num(e.param), e.error.clone()])),
    })
}

fn plot_file(meta: &Meta, name: String, x: &str, y: &str, pts: impl Iterator<Item = (f64, f64)>) -> OutputFile {
    OutputFile { name, contents: csv_file(meta, &[x, y], pts.map(|(a, b)| [num(a), num(b)])) }
}

pub fn render_drift_sweep(cfg: &ExperimentConfig, sweep: &DriftSweep, format: Format) -> CommandOutput {
    let meta = Meta::new(cfg, "drift-sweep");
    let stem = format!("{}.drift_sweep", cfg.name);
    let primary = match format {
        Format::Csv => OutputFile {
            name: format!("{stem}.csv"),
            contents: csv_file(
                &meta,
                &["param", "drift", "ci_low", "ci_high", "R_rho", "drift_over_R"],
                sweep.rows.iter().map(|r| {
                    [r.param, r.drift.mean, r.drift.ci_low, r.drift.ci_high, r.r_rho, r.drift_over_r].map(num)
                }),
            ),
        },
        Format::Json => OutputFile { name: format!("{stem}.json"), contents: json_file(&meta, sweep) },
    };
    let mut files = vec![
        primary,
        plot_file(&meta, format!("{}.drift.plot.csv", cfg.name), "param", "drift", sweep.rows.iter().map(|r| (r.param, r.drift.mean))),
        plot_file(
            &meta,
            format!("{}.drift_over_r.plot.csv", cfg.name),
            "param",
            "drift_over_R",
            sweep.rows.iter().map(|r| (r.param, r.drift_over_r)),
        ),
    ];
    files.extend(errors_file(&meta, &stem, &sweep.errors));
    let ratios: Vec<f64> = sweep.rows.iter().map(|r| r.drift_over_r).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let summary = vec![
        format!("rows: {} ok, {} failed", sweep.rows.len(), sweep.errors.len()),
        format!("drift strictly increasing across disjoint CIs: {}", sweep.strictly_increasing()),
        format!("drift/R range: [{lo:.4}, {hi:.4}]"),
    ];
    CommandOutput { files, summary, failure: None }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionRow {
    pub param: f64,
    pub entropy_upper: f64,
    pub drift: DriftEstimate,
    pub dimension: f64,
    pub dimension_error: f64,
    pub exceeds_one: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionSweep {
    pub entropy: EntropyEstimate,
    pub rows: Vec<DimensionRow>,
    pub errors: Vec<RowError>,
}

impl DimensionSweep {
    /// Dimension strictly decreases along the rows.
    pub fn decreasing(&self) -> bool {
        self.rows.windows(2).all(|p| p[1].dimension < p[0].dimension)
    }
}

/// `h/ℓ` along the grid; the entropy bound depends only on the measure.
pub fn dimension_drop(cfg: &ExperimentConfig) -> Result<DimensionSweep> {
    let mu = cfg.measure()?;
    let wc = walk_config(cfg)?;
    let entropy = estimate_entropy(&mu, cfg.entropy.n_max, cfg.entropy.cap)?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &param in &cfg.family.grid {
        let row = (|| -> Result<DimensionRow> {
            let action = cfg.family.spec.action(param)?;
            let drift = estimate_drift(action.as_ref(), &mu, &wc)?;
            let dim = estimate_dimension(&entropy, &drift)?;
            Ok(DimensionRow {
                param,
                entropy_upper: entropy.extrapolated,
                drift,
                dimension: dim.value,
                dimension_error: dim.error,
                exceeds_one: dim.exceeds_one,
            })
        })();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => errors.push(RowError { param, error: e.to_string() }),
        }
    }
    Ok(DimensionSweep { entropy, rows, errors })
}

pub fn render_dimension_drop(cfg: &ExperimentConfig, sweep: &DimensionSweep, format: Format) -> CommandOutput {
    let meta = Meta::new(cfg, "dimension-drop");
    let stem = format!("{}.dimension_drop", cfg.name);
    let primary = match format {
        Format::Csv => OutputFile {
            name: format!("{stem}.csv"),
            contents: csv_file(
                &meta,
                &["param", "entropy_upper", "drift", "dimension", "dimension_error", "exceeds_one"],
                sweep.rows.iter().map(|r| {
                    vec![
                        num(r.param),
                        num(r.entropy_upper),
                        num(r.drift.mean),
                        num(r.dimension),
                        num(r.dimension_error),
                        r.exceeds_one.to_string(),
                    ]
                }),
            ),
        },
        Format::Json => OutputFile { name: format!("{stem}.json"), contents: json_file(&meta, sweep) },
    };
    let mut files = vec![
        primary,
        plot_file(&meta, format!("{}.dimension.plot.csv", cfg.name), "param", "dimension", sweep.rows.iter().map(|r| (r.param, r.dimension))),
    ];
    files.extend(errors_file(&meta, &stem, &sweep.errors));
    let summary = vec![
        format!("entropy upper bound: {:.6} (n_max = {})", sweep.entropy.extrapolated, sweep.entropy.n_max),
        format!("dimension strictly decreasing: {}", sweep.decreasing()),
        format!(
            "rows above 1 + error: {}",
            sweep.rows.iter().filter(|r| r.exceeds_one).count()
        ),
        format!("final dimension: {}", sweep.rows.last().map_or("n/a".into(), |r| format!("{:.6}", r.dimension))),
    ];
    CommandOutput { files, summary, failure: None }
}
