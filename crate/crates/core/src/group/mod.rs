//! Free-group words, finitely supported measures, representations and the
//! rescaling factor.

pub mod measure;
pub mod representation;
pub mod rescaling;
pub mod word;

pub use measure::{pairwise_sum, FiniteMeasure, DEFAULT_SUPPORT_CAP};
pub use representation::{fricke_z, Family, Representation};
pub use rescaling::{minimax_displacement, rescaling_factor, GeneratorSet, RescalingResult, DEFAULT_RESCALING_TOL};
pub use word::{reduce, words_up_to, Letter, ReducedWord, MAX_RANK};
