use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::actions::{HyperbolicAction, MetricAction, WeightedTreeAction};
use crate::error::{Error, Result};
use crate::group::{
    rescaling_factor, FiniteMeasure, GeneratorSet, ReducedWord, Representation, DEFAULT_RESCALING_TOL,
    DEFAULT_SUPPORT_CAP,
};

/// A one-parameter family of actions; the omitted coordinate is the grid parameter.
///
/// A schottky family with neither coordinate fixed varies `t` at `θ = π/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Schottky {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<f64>,
    },
    Fricke {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<f64>,
    },
    Octagon,
    /// Cayley tree with fixed edge weights.
    Tree { weights: Vec<f64> },
}

impl FamilySpec {
    pub fn rank(&self) -> usize {
        match self {
            FamilySpec::Schottky { .. } | FamilySpec::Fricke { .. } => 2,
            FamilySpec::Octagon => 4,
            FamilySpec::Tree { weights } => weights.len(),
        }
    }

    /// Whether the grid parameter is ignored.
    pub fn is_constant(&self) -> bool {
        match self {
            FamilySpec::Schottky { t, theta } => t.is_some() && theta.is_some(),
            FamilySpec::Fricke { x, y } => x.is_some() && y.is_some(),
            FamilySpec::Octagon | FamilySpec::Tree { .. } => true,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::Fricke { x: None, y: None } => Err(
                Error::Config("a family may leave at most one coordinate free for the grid".into()),
            ),
            FamilySpec::Tree { weights } => WeightedTreeAction::new(weights.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Representation at a grid parameter; trees have none.
    pub fn representation(&self, param: f64) -> Result<Representation> {
        use crate::group::Family;
        let family = match *self {
            FamilySpec::Schottky { t, theta } => {
                let (t, theta) = match (t, theta) {
                    (Some(t), Some(th)) => (t, th),
                    (None, th) => (param, th.unwrap_or(PI / 2.0)),
                    (Some(t), None) => (t, param),
                };
                Family::Schottky { t, theta }
            }
            FamilySpec::Fricke { x, y } => Family::Fricke { x: x.unwrap_or(param), y: y.unwrap_or(param) },
            FamilySpec::Octagon => Family::Octagon,
            FamilySpec::Tree { .. } => {
                return Err(Error::Config("tree families have no representation".into()));
            }
        };
        Representation::new(family)
    }

    /// Unscaled action at a grid parameter.
    pub fn action(&self, param: f64) -> Result<Arc<dyn MetricAction>> {
        match self {
            FamilySpec::Tree { weights } => Ok(Arc::new(WeightedTreeAction::new(weights.clone())?)),
            _ => Ok(Arc::new(HyperbolicAction::new(self.representation(param)?))),
        }
    }

    /// Rescaling factor for the standard generating set `{e, a_k^{±1}}`.
    ///
    /// Every generator axis of a tree passes through the base vertex, so there the
    /// minimax displacement is the largest weight.
    pub fn rescaling(&self, param: f64, tol: f64) -> Result<f64> {
        match self {
            FamilySpec::Tree { weights } => Ok(weights.iter().copied().fold(0.0, f64::max)),
            _ => Ok(rescaling_factor(&self.representation(param)?, &GeneratorSet::standard(self.rank()), tol)?.value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySection {
    #[serde(flatten)]
    pub spec: FamilySpec,
    #[serde(default)]
    pub grid: Vec<f64>,
}

/// Which finitely supported measure drives the walk.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    #[default]
    UniformGenerators,
    PointMass { word: String },
    Uniform { words: Vec<String> },
    Weighted { atoms: Vec<(String, f64)> },
}

impl MeasureSpec {
    pub fn build(&self, rank: usize) -> Result<FiniteMeasure> {
        let parse = |s: &String| ReducedWord::parse(s, rank).map_err(|e| Error::Config(e.to_string()));
        let mu = match self {
            MeasureSpec::UniformGenerators => FiniteMeasure::uniform_generators(rank),
            MeasureSpec::PointMass { word } => FiniteMeasure::point_mass(parse(word)?),
            MeasureSpec::Uniform { words } => {
                FiniteMeasure::uniform(words.iter().map(parse).collect::<Result<Vec<_>>>()?)?
            }
            MeasureSpec::Weighted { atoms } => FiniteMeasure::new(
                atoms.iter().map(|(w, m)| Ok((parse(w)?, *m))).collect::<Result<Vec<_>>>()?,
            )?,
        };
        Ok(mu)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkSection {
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for WalkSection {
    fn default() -> Self {
        Self { steps: 2000, trials: 200, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropySection {
    pub n_max: usize,
    pub cap: usize,
}

impl Default for EntropySection {
    fn default() -> Self {
        Self { n_max: 10, cap: DEFAULT_SUPPORT_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RescalingSection {
    pub tol: f64,
}

impl Default for RescalingSection {
    fn default() -> Self {
        Self { tol: DEFAULT_RESCALING_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSection {
    pub test_words: Vec<String>,
    pub threshold: f64,
    /// Multiplier applied to every rescaling factor (1 for the honest family).
    pub factor_scale: f64,
    /// Grid parameters compared with the limit; defaults to the last three.
    pub tail: Vec<f64>,
    /// Allowed shortfall of rescaled drifts below the limit drift.
    pub drift_tolerance: f64,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            test_words: ["a", "b", "ab", "aB", "aab"].map(String::from).to_vec(),
            threshold: crate::actions::DEFAULT_DEVIATION_THRESHOLD,
            factor_scale: 1.0,
            tail: Vec::new(),
            drift_tolerance: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchottkySection {
    /// Hyperbolicity constant; each action's own when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub eta_target: f64,
    pub d_target: f64,
    pub max_power: usize,
    /// Parameter at which the search runs; first grid point when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_param: Option<f64>,
    pub pair_samples: usize,
    pub probe_len: usize,
    pub probe_extra: usize,
    pub probe_long_len: usize,
    /// Certify along the grid after dividing each action by its rescaling factor.
    pub rescale_family: bool,
}

impl Default for SchottkySection {
    fn default() -> Self {
        Self {
            delta: None,
            eta_target: 0.5,
            d_target: 1.0,
            max_power: 8,
            search_param: None,
            pair_samples: 10_000,
            probe_len: 3,
            probe_extra: 200,
            probe_long_len: 12,
            rescale_family: true,
        }
    }
}

/// Constants of the quantitative large-deviation bound, checked for consistency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSection {
    pub eta: f64,
    /// Block length `N`.
    pub n: f64,
    /// Block multiplier `A`.
    pub a: f64,
    pub alpha: f64,
    /// Mean of the jump-length lower bound `Q`.
    pub q_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Schottky constant `C`, when a certificate is attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl BoundSection {
    /// `(1 − 40η)·E(Q)/(N·A) − 2η`.
    pub fn r_bound(&self) -> f64 {
        (1.0 - 40.0 * self.eta) * self.q_mean / (self.n * self.a) - 2.0 * self.eta
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0 && self.n > 0.0 && self.a > 0.0 && self.alpha > 0.0 && self.alpha < 1.0)
        {
            return Err(Error::Config("bound needs eta, alpha in (0, 1) and positive n, a".into()));
        }
        if let Some(r) = self.r {
            let bound = self.r_bound();
            if !(r < bound) {
                return Err(Error::Config(format!("r = {r} violates r < (1-40*eta)*E(Q)/(N*A) - 2*eta = {bound:.6}")));
            }
        }
        if let Some(c) = self.c {
            if self.eta * self.a < c {
                return Err(Error::Config(format!("eta*A = {} is below C = {c}", self.eta * self.a)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncreaseSection {
    pub g: String,
    pub horizon: usize,
    pub epsilon: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailSection {
    /// Absolute rates `a`.
    pub a: Vec<f64>,
    /// Rates given as fractions of the drift estimated from the same walks.
    pub a_fraction: Vec<f64>,
    pub n_grid: Vec<usize>,
    /// Trials for the tail walks; falls back to `walk.trials`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Grid parameter of the action; first grid point when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increase: Option<IncreaseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundSection>,
}

impl Default for TailSection {
    fn default() -> Self {
        Self {
            a: Vec::new(),
            a_fraction: vec![0.5],
            n_grid: vec![50, 100, 150, 200, 250, 300, 350, 400],
            trials: None,
            param: None,
            increase: None,
            bound: None,
        }
    }
}

/// One experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub family: FamilySection,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default)]
    pub walk: WalkSection,
    #[serde(default)]
    pub entropy: EntropySection,
    #[serde(default)]
    pub rescaling: RescalingSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub schottky: SchottkySection,
    #[serde(default)]
    pub tail: TailSection,
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return bad("name must be nonempty and use only [A-Za-z0-9._-]");
        }
        self.family.spec.validate()?;
        if self.family.grid.is_empty() {
            return bad("family.grid must be nonempty");
        }
        if self.family.grid.iter().any(|p| !p.is_finite()) {
            return bad("family.grid entries must be finite");
        }
        self.measure.build(self.family.spec.rank())?;
        if self.walk.steps == 0 || self.walk.trials == 0 {
            return bad("walk.steps and walk.trials must be positive");
        }
        if self.entropy.n_max == 0 || self.entropy.cap == 0 {
            return bad("entropy.n_max and entropy.cap must be positive");
        }
        if !(self.rescaling.tol > 0.0) {
            return bad("rescaling.tol must be positive");
        }
        for w in &self.convergence.test_words {
            ReducedWord::parse(w, self.family.spec.rank()).map_err(|e| Error::Config(e.to_string()))?;
        }
        if !(self.convergence.factor_scale > 0.0 && self.convergence.threshold > 0.0) {
            return bad("convergence.factor_scale and convergence.threshold must be positive");
        }
        let s = &self.schottky;
        if !(s.eta_target > 0.0 && s.eta_target < 1.0) || s.max_power == 0 {
            return bad("schottky.eta_target must lie in (0, 1) and max_power be positive");
        }
        if s.delta.is_some_and(|d| !(d >= 0.0)) {
            return bad("schottky.delta must be non-negative");
        }
        let t = &self.tail;
        if t.a.iter().chain(&t.a_fraction).any(|a| !(*a >= 0.0)) {
            return bad("tail rates must be non-negative");
        }
        if t.n_grid.is_empty() || t.n_grid[0] == 0 || t.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("tail.n_grid must be strictly increasing positive integers");
        }
        if t.trials == Some(0) {
            return bad("tail.trials must be positive");
        }
        if let Some(inc) = &t.increase {
            ReducedWord::parse(&inc.g, self.family.spec.rank()).map_err(|e| Error::Config(e.to_string()))?;
            if inc.horizon == 0 || inc.trials == 0 || !(inc.epsilon > 0.0 && inc.epsilon < 1.0) {
                return bad("tail.increase needs horizon, trials >= 1 and epsilon in (0, 1)");
            }
        }
        if let Some(b) = &t.bound {
            b.validate()?;
        }
        Ok(())
    }

    /// Canonical TOML rendering of the effective configuration.
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    /// SHA-256 of the canonical rendering, lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_canonical_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn measure(&self) -> Result<FiniteMeasure> {
        self.measure.build(self.family.spec.rank())
    }

    pub fn test_words(&self) -> Result<Vec<ReducedWord>> {
        self.convergence
            .test_words
            .iter()
            .map(|w| ReducedWord::parse(w, self.family.spec.rank()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
name = "sweep"
[family]
family = "schottky"
theta = 1.5707963267948966
grid = [2.0, 4.0]
[walk]
steps = 100
trials = 10
seed = 3
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml_str(BASIC).unwrap();
        assert_eq!(cfg.measure, MeasureSpec::UniformGenerators);
        assert_eq!(cfg.walk, WalkSection { steps: 100, trials: 10, seed: 3 });
        assert!(!cfg.family.spec.is_constant());
        let rep = cfg.family.spec.representation(4.0).unwrap();
        assert!((rep.eval(&ReducedWord::letter(1)).unwrap().translation_length() - 4.0).abs() < 1e-12);
        // canonical form round-trips to the same hash
        let again = ExperimentConfig::from_toml_str(&cfg.to_canonical_toml()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        let with = |extra: &str| ExperimentConfig::from_toml_str(&format!("{BASIC}\n{extra}"));
        assert!(matches!(with("[tail]\nn_grid = [5, 5]"), Err(Error::Config(_))));
        assert!(matches!(with("[measure]\nkind = \"point-mass\"\nword = \"c\""), Err(Error::Config(_))));
        assert!(matches!(with("[schottky]\neta_target = 1.5"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("name = \"x\""), Err(Error::Config(_))));
        let bad_family = BASIC.replace("family = \"schottky\"\ntheta = 1.5707963267948966", "family = \"fricke\"");
        assert!(matches!(ExperimentConfig::from_toml_str(&bad_family), Err(Error::Config(_))));
        assert!(with("[walk2]\nx = 1").is_err());
    }

    #[test]
    fn bound_validation_quotes_the_limit() {
        let bound = |r: f64| {
            format!("[tail.bound]\neta = 0.01\nn = 2.0\na = 10.0\nalpha = 0.1\nq_mean = 10.0\nr = {r}\nc = 0.05")
        };
        // (1 − 0.4)·10/20 − 0.02 = 0.28
        let ok = ExperimentConfig::from_toml_str(&format!("{BASIC}\n{}", bound(0.2)));
        assert!(ok.is_ok(), "{ok:?}");
        let err = ExperimentConfig::from_toml_str(&format!("{BASIC}\n{}", bound(0.3))).unwrap_err();
        assert!(err.to_string().contains("0.28"), "{err}");
        let big_c = bound(0.2).replace("c = 0.05", "c = 0.5");
        let err = ExperimentConfig::from_toml_str(&format!("{BASIC}\n{big_c}")).unwrap_err();
        assert!(err.to_string().contains("below C"), "{err}");
    }
}
