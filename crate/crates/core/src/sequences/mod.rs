//! Sequence families in `ℂ^n`, their derivations, and the uniqueness
//! classifiers.
//!
//! Verdicts only ever come from a named rule. Anything computed from a
//! finite prefix (spacing, sector bounds, lattice density) is recorded as
//! evidence in the certificate, never as a proof.

mod blaschke;
mod classify;
mod family;
mod muntz;
mod spec;

pub use blaschke::{
    blaschke_sum_classify, blaschke_term, ocv_margin, profile, subp_margin, BlaschkeOutcome, BlaschkeReport, Profile,
    DEFAULT_BLASCHKE_PREFIX,
};
pub use classify::{classify_1d, classify_nd, Certificate, Classifier, Status, Verdict};
pub use family::{Derivation, ExplicitSource, FamilyKind, Generator, Pairing, Point, SequenceFamily};
pub use muntz::{
    min_pairwise_distance, muntz_check, sampled_separation, ImConstancy, MuntzReport, DEFAULT_MUNTZ_PREFIX,
};
pub use spec::{format_complex, parse_complex, parse_family, read_points_csv};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("family exhausted: requested {requested} points, only {available} exist")]
    Exhausted { requested: usize, available: usize },
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
