//! Numerical transforms for black-box functions.
//!
//! Everything here works on a [`FunctionDescriptor`]: an evaluator on
//! `[0,∞)^n` together with a growth hint `|f(t)| ≤ M·e^{ω·t}` and an optional
//! bounding box of the support. The growth hint is what turns a finite
//! quadrature into a value with an error bound.
//!
//! The Wright function `Φ_γ` is taken to be the standard one,
//! `Φ_γ(s) = Σ_k (−s)^k / (k!·Γ(1−γ−γk))`, normalised so that
//! `∫₀^∞ Φ_γ = 1`. For γ = 1/2 it reduces to `e^{−s²/4}/√π`.

mod descriptor;
mod isometry;
mod laplace;
pub mod quadrature;
mod subordinate;
mod wright;

pub use descriptor::{Evaluator, FunctionDescriptor, GrowthHint};
pub use isometry::{isometry_phi, l1_norm};
pub use laplace::{
    laplace_numeric, laplace_numeric_with_budget, region_probe_b, RegionProbe, TransformValue, DEFAULT_MAX_NODES,
    DEFAULT_PROBE_SCHEDULE,
};
pub use subordinate::{subordinate, SubordinationValue, Subordinator};
pub use wright::{
    wright_eval, wright_integral, wright_moment, wright_moment_with, wright_series, WrightParams, WrightTail,
    WRIGHT_MAX_ARG,
};

use thiserror::Error;

use crate::exact::ExactError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Re λ_{coord} = {re_lambda} does not exceed the growth rate ω = {omega}; tail bound undefined")]
    OutsideRegion { coord: usize, re_lambda: f64, omega: f64 },
    #[error("quadrature budget exhausted; best value {} with error bound {}", .best.value, .best.abs_error)]
    BudgetExceeded { best: TransformValue },
    #[error("argument {arg} outside the reliable range [0, {max}]; restrict the range")]
    OutOfRange { arg: f64, max: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
