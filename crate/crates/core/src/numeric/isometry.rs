use num_complex::Complex64;

use super::{laplace_numeric, FunctionDescriptor, GrowthHint, NumericError, TransformValue};

impl FunctionDescriptor {
    /// A function on the open unit cube `(0,1)^n` with `|g| ≤ bound`.
    pub fn on_unit_cube<F>(dim: usize, bound: f64, g: F) -> Result<Self, NumericError>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(dim, GrowthHint { m: bound.max(1.0), omega: vec![0.0; dim] }, g)?.with_support(vec![1.0; dim])
    }
}

/// `t ↦ a₁⋯a_n · e^{−a·t} · g(e^{−a₁t₁}, …, e^{−a_nt_n})`, mapping `L¹((0,1)^n)`
/// isometrically onto `L¹([0,∞)^n)`.
///
/// The growth hint of `g` is read as a bound on the closed cube, so the image
/// satisfies `|Φg(t)| ≤ ∏a · M e^{Σ ω₊} · e^{−a·t}`.
pub fn isometry_phi(g: &FunctionDescriptor, a: &[f64]) -> Result<FunctionDescriptor, NumericError> {
    let n = g.dim();
    if a.len() != n {
        return Err(NumericError::DimensionMismatch { expected: n, found: a.len() });
    }
    if a.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(NumericError::InvalidParameter(format!("scales must be positive, got {a:?}")));
    }
    let jacobian: f64 = a.iter().product();
    let sup = g.growth().m * g.growth().omega.iter().map(|w| w.max(0.0)).sum::<f64>().exp();
    let hint = GrowthHint { m: (jacobian * sup).max(1.0), omega: a.iter().map(|x| -x).collect() };
    let inner = g.clone();
    let scales = a.to_vec();
    FunctionDescriptor::new(n, hint, move |t: &[f64]| {
        let x: Vec<f64> = scales.iter().zip(t).map(|(s, tj)| (-s * tj).exp()).collect();
        let weight: f64 = x.iter().product::<f64>() * jacobian;
        // e^{−a·t} underflows to 0 far out; the cube's closed face is never sampled
        if weight == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        inner.eval_unchecked(&x) * weight
    })
}

/// `‖f‖₁ = ∫|f|`, computed as the transform of `|f|` at `λ = 0`.
pub fn l1_norm(f: &FunctionDescriptor, tol: f64) -> Result<TransformValue, NumericError> {
    laplace_numeric(&f.abs(), &vec![Complex64::new(0.0, 0.0); f.dim()], tol)
}
