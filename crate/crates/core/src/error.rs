use thiserror::Error;

/// Errors raised by the geometry, group, walk and certification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({re}, {im}) is not in the upper half-plane")]
    InvalidPoint { re: f64, im: f64 },

    #[error("matrix determinant {0} is not positive")]
    NonPositiveDeterminant(f64),

    #[error("product matrix is numerically zero (catastrophic cancellation)")]
    NumericallyZeroProduct,

    #[error("boundary image: the point is mapped to the boundary at infinity")]
    BoundaryImage,

    #[error("near-parabolic: classification unreliable (trace {trace})")]
    NearParabolic { trace: f64 },

    #[error("the identity has no isolated fixed points")]
    IdentityFixedPoints,

    #[error("isometry is not loxodromic: {0}")]
    NotLoxodromic(String),

    #[error("letter {letter} out of range for rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("cannot parse word {0:?}")]
    InvalidWord(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("convolution blow-up: support exceeds the cap of {cap} atoms; use a smaller n_max or power")]
    ConvolutionBlowUp { cap: usize },

    #[error("domination failure at word {word}: deficit {deficit:e}")]
    DominationFailure { word: String, deficit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fricke discriminant is negative for x = {x}, y = {y}")]
    FrickeDiscriminant { x: f64, y: f64 },

    #[error("minimax solver did not converge after {iterations} iterations (best value {best})")]
    NonConvergence { best: f64, iterations: usize },

    #[error("generator set is not symmetric")]
    NotSymmetric,

    #[error("generator set contains the identity")]
    ContainsIdentity,

    #[error("family not visibly convergent on this grid: {0}")]
    NotConvergent(String),

    #[error("measure appears elementary for this action")]
    Elementary,

    #[error("no Schottky set certified up to power {max_power} (best margin {best_margin})")]
    MaxPowerExceeded { max_power: usize, best_margin: f64 },

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
