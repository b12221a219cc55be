//! Named, reproducible experiments driven by TOML configuration files.
//!
//! Every command is a pure function of its [`ExperimentConfig`]: it returns a
//! structured report and renders it to in-memory files. Outputs embed the
//! SHA-256 of the canonical configuration and the seed, and identical
//! configurations give byte-identical files.

mod certificate;
mod config;
mod output;
mod semicontinuity;
mod sweep;
mod tail;

use std::fmt;
use std::str::FromStr;

pub use certificate::{render_schottky_certify, schottky_certify, BruteSummary, BundleError, CertificateBundle};
pub use config::{
    BoundSection, ConvergenceSection, EntropySection, ExperimentConfig, FamilySection, FamilySpec, IncreaseSection,
    MeasureSpec, RescalingSection, SchottkySection, TailSection, WalkSection,
};
pub use output::{csv_file, json_file, CommandOutput, Format, Meta, OutputFile};
pub use semicontinuity::{render_semicontinuity, semicontinuity, InequalityStatus, RescaledDriftRow, SemicontinuityReport};
pub use sweep::{
    dimension_drop, drift_sweep, render_dimension_drop, render_drift_sweep, DimensionRow, DimensionSweep, DriftRow,
    DriftSweep, RowError,
};
pub use tail::{render_tail, tail, TailReport};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    DriftSweep,
    Semicontinuity,
    DimensionDrop,
    SchottkyCertify,
    Tail,
}

impl Command {
    pub const ALL: [Command; 5] =
        [Command::DriftSweep, Command::Semicontinuity, Command::DimensionDrop, Command::SchottkyCertify, Command::Tail];

    pub fn name(self) -> &'static str {
        match self {
            Command::DriftSweep => "drift-sweep",
            Command::Semicontinuity => "semicontinuity",
            Command::DimensionDrop => "dimension-drop",
            Command::SchottkyCertify => "schottky-certify",
            Command::Tail => "tail",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown command {s:?}")))
    }
}

/// Runs a command and renders its outputs.
///
/// Report-style commands (semicontinuity, schottky-certify) always emit JSON.
pub fn run(command: Command, cfg: &ExperimentConfig, format: Format) -> Result<CommandOutput> {
    Ok(match command {
        Command::DriftSweep => render_drift_sweep(cfg, &drift_sweep(cfg)?, format),
        Command::Semicontinuity => render_semicontinuity(cfg, &semicontinuity(cfg)?),
        Command::DimensionDrop => render_dimension_drop(cfg, &dimension_drop(cfg)?, format),
        Command::SchottkyCertify => render_schottky_certify(cfg, &schottky_certify(cfg)?),
        Command::Tail => render_tail(cfg, &tail(cfg)?, format),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(body: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(body).unwrap()
    }

    const SCHOTTKY: &str = r#"
name = "small"
[family]
family = "schottky"
grid = [2.0, 4.0, 6.0]
[walk]
steps = 400
trials = 60
seed = 9
"#;

    #[test]
    fn drift_sweep_rows_and_files() {
        let c = cfg(SCHOTTKY);
        let sweep = drift_sweep(&c).unwrap();
        assert_eq!(sweep.rows.len(), 3);
        assert!(sweep.errors.is_empty());
        assert!(sweep.strictly_increasing(), "{:?}", sweep.rows);
        // right-angle schottky sets have R_ρ = t
        for r in &sweep.rows {
            assert!((r.r_rho - r.param).abs() < 1e-6);
        }
        let out = render_drift_sweep(&c, &sweep, Format::Csv);
        let names: Vec<&str> = out.files.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["small.drift_sweep.csv", "small.drift.plot.csv", "small.drift_over_r.plot.csv"]);
        let primary = &out.files[0].contents;
        assert!(primary.starts_with(&format!("# hypwalk {} experiment=small", env!("CARGO_PKG_VERSION"))));
        assert!(primary.contains(&c.hash()) && primary.contains("seed=9"));
        assert_eq!(primary.lines().nth(1), Some("param,drift,ci_low,ci_high,R_rho,drift_over_R"));
        assert!(!primary.contains('\r'));
        assert_eq!(run(Command::DriftSweep, &c, Format::Csv).unwrap(), out);
        let json = run(Command::DriftSweep, &c, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json.files[0].contents).unwrap();
        assert_eq!(v["meta"]["config_sha256"], c.hash());
    }

    #[test]
    fn failing_rows_go_to_errors_file() {
        // x = 1 gives a negative discriminant, so that row fails while the others run
        let c = cfg(r#"
name = "fr"
[family]
family = "fricke"
y = 3.0
grid = [1.0, 3.0]
[walk]
steps = 50
trials = 10
"#);
        let sweep = drift_sweep(&c).unwrap();
        assert_eq!((sweep.rows.len(), sweep.errors.len()), (1, 1));
        let out = render_drift_sweep(&c, &sweep, Format::Csv);
        let err = out.files.iter().find(|f| f.name == "fr.drift_sweep.errors.csv").unwrap();
        assert!(err.contents.contains("\n1,"), "{}", err.contents);
    }

    #[test]
    fn constant_family_has_constant_drift() {
        let c = cfg(r#"
name = "const"
[family]
family = "fricke"
x = 3.0
y = 4.0
grid = [1.0, 2.0, 3.0]
[walk]
steps = 200
trials = 40
"#);
        let sweep = drift_sweep(&c).unwrap();
        // same seed per row, so the rows coincide exactly
        assert!(sweep.rows.windows(2).all(|p| p[0].drift == p[1].drift));
    }

    #[test]
    fn dimension_examples() {
        let c = cfg(&SCHOTTKY.replace("[walk]", "[entropy]\nn_max = 6\n[walk]"));
        let sweep = dimension_drop(&c).unwrap();
        assert!(sweep.decreasing());
        for r in &sweep.rows {
            assert!((r.dimension - r.entropy_upper / r.drift.mean).abs() < 1e-15);
            assert!(!r.exceeds_one);
        }
        let pm = cfg(&SCHOTTKY.replace("[walk]", "[measure]\nkind = \"point-mass\"\nword = \"ab\"\n[walk]"));
        let sweep = dimension_drop(&pm).unwrap();
        assert!(sweep.rows.iter().all(|r| r.dimension == 0.0));
    }

    #[test]
    fn semicontinuity_on_a_constant_tree_is_exact() {
        let c = cfg(r#"
name = "tree"
[family]
family = "tree"
weights = [2.0, 1.0]
grid = [0.0]
[walk]
steps = 300
trials = 50
"#);
        let rep = semicontinuity(&c).unwrap();
        assert_eq!(rep.limit_weights, vec![1.0, 0.5]);
        assert!(rep.min_tail_difference.abs() < 1e-12, "{}", rep.min_tail_difference);
        assert_eq!(rep.inequality, InequalityStatus::Holds);
    }

    #[test]
    fn misscaled_semicontinuity_is_not_applicable() {
        let body = r#"
name = "semi"
[family]
family = "schottky"
grid = [8.0, 12.0, 16.0]
[walk]
steps = 300
trials = 40
"#;
        let honest = semicontinuity(&cfg(body)).unwrap();
        assert!(honest.limit_weights.iter().all(|w| (w - 1.0).abs() < 1e-6));
        let bad = semicontinuity(&cfg(&format!("{body}[convergence]\nfactor_scale = 2.0\n"))).unwrap();
        assert!(!bad.convergence.converged);
        assert_eq!(bad.inequality, InequalityStatus::NotApplicable);
        let out = render_semicontinuity(&cfg(body), &honest);
        assert_eq!(out.files[1].name, "semi.convergence.csv");
    }

    #[test]
    fn schottky_bundle_examples() {
        let c = cfg(r#"
name = "cert"
[family]
family = "schottky"
grid = [10.0, 16.0, 24.0]
[schottky]
pair_samples = 2000
"#);
        let b = schottky_certify(&c).unwrap();
        let found = b.search.as_ref().unwrap();
        assert_eq!(found.power, 1);
        assert!(b.brute.as_ref().unwrap().violations.is_empty());
        assert!(b.family.as_ref().unwrap().uniform);

        let pm = cfg(r#"
name = "elem"
[family]
family = "schottky"
grid = [10.0]
[measure]
kind = "uniform"
words = ["a", "A"]
"#);
        let b = schottky_certify(&pm).unwrap();
        assert_eq!(b.error.as_ref().unwrap().kind, "Elementary");
        let out = render_schottky_certify(&pm, &b);
        assert!(out.failure.is_some());
        assert!(out.files[0].contents.contains("\"Elementary\""));
    }

    #[test]
    fn tail_examples() {
        let positive = cfg(r#"
name = "t"
[family]
family = "tree"
weights = [1.0, 1.0]
grid = [0.0]
[measure]
kind = "uniform"
words = ["a", "b", "ab"]
[walk]
trials = 500
[tail]
a = [0.0, 3.0]
a_fraction = []
n_grid = [10, 20, 30, 40]
"#);
        let rep = tail(&positive).unwrap();
        assert!(rep.estimates[0].probs.iter().all(|&p| p == 0.0));
        assert!(rep.estimates[1].warning.is_some());
        let out = render_tail(&positive, &rep, Format::Csv);
        let fit = &out.files.iter().find(|f| f.name == "t.tail_fit.csv").unwrap().contents;
        let rows: Vec<&str> = fit.lines().skip(2).collect();
        assert!(rows[0].starts_with("0,inf,"), "{}", rows[0]);
        assert!(rows[1].starts_with("3,,,,4,rate 3 not below drift"), "{}", rows[1]);

        let srw = cfg(r#"
name = "srw"
[family]
family = "tree"
weights = [1.0, 1.0]
grid = [0.0]
[walk]
trials = 20000
[tail]
n_grid = [10, 20, 30, 40]
[tail.increase]
g = "aaa"
horizon = 50
epsilon = 0.1
trials = 200
"#);
        let rep = tail(&srw).unwrap();
        assert!((rep.estimates[0].a - 0.5 * rep.empirical_drift).abs() < 1e-15);
        assert!(rep.estimates[0].kappa_hat.unwrap() > 0.0);
        let out = render_tail(&srw, &rep, Format::Csv);
        assert!(out.files.iter().any(|f| f.name == "srw.dist_increase.csv"));
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }
}
