//! Exact symbolic algebra for exp-polynomials on `[0,∞)^n`.
//!
//! Functions of the form `Σ c·∏_j t_j^{α_j} e^{μ_j t_j}` with Gaussian-rational
//! coefficients and rates are closed under the finite convolution `∗₀`, its
//! partial variant over a coordinate subset, and iterated antiderivatives.
//! Their Laplace transforms are finite sums of pole terms
//! `c / ∏_j (λ_j − μ_j)^{p_j}`, which is the representation every exact
//! operation here goes through: multiply transforms, split each coordinate
//! into partial fractions, and map every pole term back to a monomial.
//!
//! The functions `g_k(t) = t^{k−1}/(k−1)!` used by the diagonal witness are
//! not written out in the source material; they are fixed here as the unique
//! choice reproducing the stated transform `(λ₁−λ₂)/(λ₁³λ₂³)`.

mod dd;
mod exppoly;
mod gaussian;
mod partial_fraction;
mod post_widder;
mod serial;
mod transform;

pub use exppoly::{g_k, ExpMonomial, ExpPolynomial};
pub use gaussian::GaussianRational;
pub use partial_fraction::split_pole_product;
pub use post_widder::post_widder_inverse;
pub use transform::{PoleTerm, RationalTransform};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid coordinate subset: {0}")]
    InvalidSubset(String),
    #[error("evaluation point hits a pole in coordinate {coord}")]
    Pole { coord: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

/// Strictly increasing, nonempty set of 0-based coordinate indices
/// `{j₁ < … < j_l}` within a dimension bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct IndexSubset(Vec<usize>);

impl IndexSubset {
    /// Build from 0-based indices; sorted and checked against `dim`.
    pub fn new(mut coords: Vec<usize>, dim: usize) -> Result<Self, ExactError> {
        if coords.is_empty() {
            return Err(ExactError::InvalidSubset("empty subset".into()));
        }
        coords.sort_unstable();
        if coords.windows(2).any(|w| w[0] == w[1]) {
            return Err(ExactError::InvalidSubset(format!("repeated index in {coords:?}")));
        }
        if let Some(&last) = coords.last() {
            if last >= dim {
                return Err(ExactError::InvalidSubset(format!("index {last} out of range for dimension {dim}")));
            }
        }
        Ok(Self(coords))
    }

    /// Build from 1-based indices as they appear in user-facing specs.
    pub fn from_one_based(coords: &[usize], dim: usize) -> Result<Self, ExactError> {
        if coords.contains(&0) {
            return Err(ExactError::InvalidSubset("indices are 1-based".into()));
        }
        Self::new(coords.iter().map(|c| c - 1).collect(), dim)
    }

    pub fn full(dim: usize) -> Self {
        Self((0..dim).collect())
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// Position of coordinate `j` inside the subset.
    pub fn position(&self, j: usize) -> Option<usize> {
        self.0.binary_search(&j).ok()
    }

    pub fn max_index(&self) -> usize {
        *self.0.last().expect("nonempty")
    }
}

/// Laplace transform of an exp-polynomial; never fails.
pub fn laplace_exact(f: &ExpPolynomial) -> RationalTransform {
    f.laplace()
}

/// Full finite convolution `f ∗₀ g`.
pub fn conv_full(f: &ExpPolynomial, g: &ExpPolynomial) -> Result<ExpPolynomial, ExactError> {
    f.convolve(g)
}

/// Partial convolution of `a` (dim `l`) with `u` (dim `n`) over the coordinates in `subset`.
pub fn conv_partial(a: &ExpPolynomial, u: &ExpPolynomial, subset: &IndexSubset) -> Result<ExpPolynomial, ExactError> {
    u.convolve_partial(a, subset)
}

/// Iterated antiderivative `G(t) = ∫₀^{t₁}…∫₀^{t_n} f`.
pub fn antiderivative(f: &ExpPolynomial) -> ExpPolynomial {
    f.antiderivative()
}
