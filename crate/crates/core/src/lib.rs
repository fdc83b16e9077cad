//! Uniqueness sequences for the multidimensional Laplace transform.
//!
//! * [`exact`]: exact exp-polynomial algebra (transforms, convolutions,
//!   antiderivatives, Post–Widder inversion).
//! * [`numeric`]: quadrature-based transforms, the Wright function,
//!   subordination and the isometry onto `L¹((0,1)^n)`.
//! * [`sequences`]: sequence families, their derivations and the
//!   classifiers that turn known theorems into verdicts.
//! * [`counterexamples`]: explicit non-uniqueness witnesses.
//! * [`harness`]: seeded property suites over all of the above.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counterexamples;
pub mod exact;
pub mod harness;
pub mod numeric;
pub mod sequences;
