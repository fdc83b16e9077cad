use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumericError;
use crate::exact::ExpPolynomial;

/// Black-box evaluator. It is called concurrently from quadrature workers,
/// so it must be `Send + Sync`.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Asserted bound `|f(t)| ≤ m·e^{ω·t}` with `m ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthHint {
    pub m: f64,
    pub omega: Vec<f64>,
}

#[derive(Clone)]
pub struct FunctionDescriptor {
    dim: usize,
    evaluator: Evaluator,
    growth: GrowthHint,
    support: Option<Vec<f64>>,
    rough_at_origin: bool,
}

impl fmt::Debug for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionDescriptor")
            .field("dim", &self.dim)
            .field("growth", &self.growth)
            .field("support", &self.support)
            .field("rough_at_origin", &self.rough_at_origin)
            .finish_non_exhaustive()
    }
}

impl FunctionDescriptor {
    pub fn new<F>(dim: usize, growth: GrowthHint, f: F) -> Result<Self, NumericError>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::from_evaluator(dim, growth, Arc::new(f))
    }

    pub fn from_evaluator(dim: usize, growth: GrowthHint, evaluator: Evaluator) -> Result<Self, NumericError> {
        if dim == 0 {
            return Err(NumericError::InvalidParameter("dimension must be positive".into()));
        }
        if growth.omega.len() != dim {
            return Err(NumericError::DimensionMismatch { expected: dim, found: growth.omega.len() });
        }
        if !(growth.m >= 1.0 && growth.m.is_finite()) || growth.omega.iter().any(|w| !w.is_finite()) {
            return Err(NumericError::InvalidParameter(format!(
                "growth hint needs finite M >= 1 and finite ω, got M = {}",
                growth.m
            )));
        }
        Ok(Self { dim, evaluator, growth, support: None, rough_at_origin: false })
    }

    /// Declares `f = 0` outside `∏ [0, upper_j]`.
    pub fn with_support(mut self, upper: Vec<f64>) -> Result<Self, NumericError> {
        if upper.len() != self.dim {
            return Err(NumericError::DimensionMismatch { expected: self.dim, found: upper.len() });
        }
        if upper.iter().any(|u| !(*u > 0.0 && u.is_finite())) {
            return Err(NumericError::InvalidParameter(format!("support box must be positive, got {upper:?}")));
        }
        self.support = Some(upper);
        Ok(self)
    }

    /// Marks the function as non-smooth at `t = 0` (e.g. `√t` behaviour), so
    /// quadrature grades its panels toward the origin.
    pub fn rough_at_origin(mut self) -> Self {
        self.rough_at_origin = true;
        self
    }

    /// Descriptor of an exp-polynomial with the growth hint of
    /// [`ExpPolynomial::growth_bound`].
    pub fn from_exppoly(f: &ExpPolynomial, eps: f64) -> Self {
        let (m, omega) = f.growth_bound(eps);
        let g = f.clone();
        let dim = f.dim();
        Self::new(dim, GrowthHint { m, omega }, move |t: &[f64]| g.eval_unchecked(t))
            .expect("exp-polynomial growth bound is valid")
    }

    /// `t ↦ |f(t)|` with the same hints.
    pub fn abs(&self) -> Self {
        let inner = self.evaluator.clone();
        Self {
            dim: self.dim,
            evaluator: Arc::new(move |t: &[f64]| Complex64::new(inner(t).norm(), 0.0)),
            growth: self.growth.clone(),
            support: self.support.clone(),
            rough_at_origin: self.rough_at_origin,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn growth(&self) -> &GrowthHint {
        &self.growth
    }

    pub fn support(&self) -> Option<&[f64]> {
        self.support.as_deref()
    }

    pub fn is_rough_at_origin(&self) -> bool {
        self.rough_at_origin
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    /// Evaluates `f(t)`; zero outside a declared support.
    pub fn eval(&self, t: &[f64]) -> Result<Complex64, NumericError> {
        if t.len() != self.dim {
            return Err(NumericError::DimensionMismatch { expected: self.dim, found: t.len() });
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &[f64]) -> Complex64 {
        if let Some(up) = &self.support {
            if t.iter().zip(up).any(|(x, u)| x > u) {
                return Complex64::new(0.0, 0.0);
            }
        }
        (self.evaluator)(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{g_k, GaussianRational};

    #[test]
    fn rejects_bad_hints() {
        let one = |_: &[f64]| Complex64::new(1.0, 0.0);
        assert!(FunctionDescriptor::new(1, GrowthHint { m: 0.5, omega: vec![0.0] }, one).is_err());
        assert!(FunctionDescriptor::new(2, GrowthHint { m: 1.0, omega: vec![0.0] }, one).is_err());
        assert!(FunctionDescriptor::new(1, GrowthHint { m: 1.0, omega: vec![f64::NAN] }, one).is_err());
        let d = FunctionDescriptor::new(1, GrowthHint { m: 1.0, omega: vec![0.0] }, one).unwrap();
        assert!(d.clone().with_support(vec![-1.0]).is_err());
        assert!(d.eval(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn support_zeroes_outside_box() {
        let d =
            FunctionDescriptor::new(1, GrowthHint { m: 1.0, omega: vec![0.0] }, |_: &[f64]| Complex64::new(1.0, 0.0))
                .unwrap()
                .with_support(vec![2.0])
                .unwrap();
        assert_eq!(d.eval(&[1.5]).unwrap().re, 1.0);
        assert_eq!(d.eval(&[2.5]).unwrap().re, 0.0);
    }

    #[test]
    fn exppoly_growth_hint_dominates() {
        let f = g_k(3).tensor(&ExpPolynomial::exponential(vec![GaussianRational::complex(-1, 2)]));
        let d = FunctionDescriptor::from_exppoly(&f, 0.2);
        let GrowthHint { m, omega } = d.growth().clone();
        for i in 0..40 {
            let t = [i as f64 * 0.7, i as f64 * 0.3];
            let bound = m * (omega[0] * t[0] + omega[1] * t[1]).exp();
            assert!(d.eval(&t).unwrap().norm() <= bound);
        }
        assert!((d.abs().eval(&[1.0, 1.0]).unwrap().im).abs() == 0.0);
    }
}
