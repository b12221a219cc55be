//! Schottky sets: certification by the finite-point criterion, brute-force
//! checks against the definition, and constructive search in convolution powers.

mod brute;
mod certify;
mod family;
mod search;

pub use brute::{brute_check, brute_check_exhaustive, probe_words, SchottkyViolation, BRUTE_TOL};
pub use certify::{
    certify, criterion, power_set, schottky_constants, Certification, CriterionFailure, SchottkyCertificate,
};
pub use family::{certify_family, FamilyCertification, FamilyPointCertification};
pub use search::{search, SearchResult, MAX_ATOM_PRODUCT};
