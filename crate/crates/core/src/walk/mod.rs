//! Random walks driven by finitely supported measures, and estimators built on them.
//!
//! Trial `k` of a run with seed `s` draws from a ChaCha8 stream keyed by `s`
//! on stream `k`, so results do not depend on scheduling or on `--jobs`.

mod drift;
mod engine;
mod entropy;
mod hitting;
mod increase;
pub mod stats;
mod tail;

pub use drift::{estimate_dimension, estimate_drift, DimensionEstimate, DriftEstimate};
pub use engine::{sample_walk, sample_walk_at, trial_rng, WalkConfig};
pub use entropy::{estimate_entropy, EntropyEstimate};
pub use hitting::hitting_sample;
pub use increase::{check_distance_increase, DistanceIncreaseEstimate};
pub use tail::{estimate_tail, estimate_tails, TailEstimate, TailSamples};
