use serde::Serialize;

use super::config::{BoundSection, ExperimentConfig};
use super::output::{csv_file, json_file, num, opt_num, CommandOutput, Format, Meta, OutputFile};
use crate::error::Result;
use crate::group::ReducedWord;
use crate::walk::{check_distance_increase, DistanceIncreaseEstimate, TailEstimate, TailSamples};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub param: f64,
    pub empirical_drift: f64,
    pub estimates: Vec<TailEstimate>,
    pub increase: Option<DistanceIncreaseEstimate>,
    pub bound: Option<BoundSection>,
    /// `(1 − 40η)·E(Q)/(N·A) − 2η` when bound constants are configured.
    pub r_bound: Option<f64>,
}

pub fn tail(cfg: &ExperimentConfig) -> Result<TailReport> {
    let t = &cfg.tail;
    let spec = &cfg.family.spec;
    let param = t.param.unwrap_or(cfg.family.grid[0]);
    let action = spec.action(param)?;
    let mu = cfg.measure()?;
    let trials = t.trials.unwrap_or(cfg.walk.trials);
    let samples = TailSamples::collect(&mu, action.as_ref(), &t.n_grid, trials, cfg.walk.seed)?;
    let drift = samples.empirical_drift();
    let rates: Vec<f64> = t.a.iter().copied().chain(t.a_fraction.iter().map(|f| f * drift)).collect();
    let estimates = rates.iter().map(|&a| samples.estimate(a)).collect::<Result<Vec<_>>>()?;
    let increase = match &t.increase {
        Some(inc) => Some(check_distance_increase(
            &mu,
            action.as_ref(),
            &ReducedWord::parse(&inc.g, spec.rank())?,
            inc.horizon,
            inc.epsilon,
            inc.trials,
            cfg.walk.seed,
        )?),
        None => None,
    };
    Ok(TailReport {
        param,
        empirical_drift: drift,
        estimates,
        increase,
        r_bound: t.bound.as_ref().map(BoundSection::r_bound),
        bound: t.bound.clone(),
    })
}

/// κ column: the fit, `inf` when every cell is censored, empty when a fit is not meaningful.
fn kappa_cell(e: &TailEstimate) -> String {
    if e.warning.is_some() {
        String::new()
    } else if e.censored.iter().all(|&c| c) {
        "inf".into()
    } else {
        opt_num(e.kappa_hat)
    }
}

pub fn render_tail(cfg: &ExperimentConfig, report: &TailReport, format: Format) -> CommandOutput {
    let meta = Meta::new(cfg, "tail");
    let stem = format!("{}.tail", cfg.name);
    let mut files = match format {
        Format::Csv => vec![
            OutputFile {
                name: format!("{stem}.csv"),
                contents: csv_file(
                    &meta,
                    &["a", "n", "empirical_prob", "log_prob", "censored"],
                    report.estimates.iter().flat_map(|e| {
                        (0..e.n_grid.len()).map(move |j| {
                            vec![
                                num(e.a),
                                e.n_grid[j].to_string(),
                                num(e.probs[j]),
                                num(e.log_probs[j]),
                                e.censored[j].to_string(),
                            ]
                        })
                    }),
                ),
            },
            OutputFile {
                name: format!("{stem}_fit.csv"),
                contents: csv_file(
                    &meta,
                    &["a", "kappa_hat", "intercept", "r_squared", "uncensored_cells", "warning"],
                    report.estimates.iter().map(|e| {
                        let fitted = e.warning.is_none();
                        vec![
                            num(e.a),
                            kappa_cell(e),
                            if fitted { opt_num(e.intercept) } else { String::new() },
                            if fitted { opt_num(e.r_squared) } else { String::new() },
                            e.censored.iter().filter(|c| !**c).count().to_string(),
                            e.warning.clone().unwrap_or_default(),
                        ]
                    }),
                ),
            },
        ],
        Format::Json => vec![OutputFile { name: format!("{stem}.json"), contents: json_file(&meta, report) }],
    };
    if let (Format::Csv, Some(inc)) = (format, &report.increase) {
        files.push(OutputFile {
            name: format!("{}.dist_increase.csv", cfg.name),
            contents: csv_file(
                &meta,
                &["g", "horizon", "epsilon", "E_hat", "base_distance", "trials"],
                [vec![
                    inc.g.to_string(),
                    inc.horizon.to_string(),
                    num(inc.epsilon),
                    num(inc.e_hat),
                    num(inc.base_distance),
                    inc.trials.to_string(),
                ]],
            ),
        });
    }
    for e in &report.estimates {
        files.push(OutputFile {
            name: format!("{}.tail_a{}.plot.csv", cfg.name, num(e.a)),
            contents: csv_file(
                &meta,
                &["n", "log_prob"],
                e.n_grid.iter().zip(&e.log_probs).map(|(n, lp)| [n.to_string(), num(*lp)]),
            ),
        });
    }
    let mut summary = vec![format!("empirical drift at n = {}: {:.6}", cfg.tail.n_grid.last().unwrap_or(&0), report.empirical_drift)];
    for e in &report.estimates {
        summary.push(match &e.warning {
            Some(w) => format!("a = {:.6}: warning: {w}", e.a),
            None => format!("a = {:.6}: kappa_hat = {}, r^2 = {}", e.a, kappa_cell(e), opt_num(e.r_squared)),
        });
    }
    if let Some(inc) = &report.increase {
        summary.push(format!("E_hat({}, horizon {}, eps {}) = {:.6}", inc.g, inc.horizon, inc.epsilon, inc.e_hat));
    }
    if let Some(rb) = report.r_bound {
        summary.push(format!("configured r bound: {rb:.6}"));
    }
    CommandOutput { files, summary, failure: None }
}
