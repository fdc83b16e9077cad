use num_complex::Complex64;

use super::{ExactError, RationalTransform};

/// Post–Widder approximant of the inverse transform at `t`:
///
/// `∏_j [(−1)^k/k! (k/t_j)^{k+1}] · ∂^k_{λ₁}⋯∂^k_{λ_n} F` at `λ_j = k/t_j`.
///
/// The derivatives are taken symbolically: `∂^k (λ−μ)^{−p} = (−1)^k (p)_k (λ−μ)^{−p−k}`,
/// so each pole term contributes `∏_j C(p+k−1, k) · x^{k+1}/(x−μ)^{p+k}` with `x = k/t_j`.
/// For `F = 1/λ` every factor is `(x/x)^{k+1} = 1` and the result is exactly 1.
pub fn post_widder_inverse(f: &RationalTransform, t: &[f64], k: u32) -> Result<Complex64, ExactError> {
    if t.len() != f.dim() {
        return Err(ExactError::DimensionMismatch { expected: f.dim(), found: t.len() });
    }
    if k == 0 {
        return Err(ExactError::Invalid("order k must be positive".into()));
    }
    if let Some(&bad) = t.iter().find(|&&tj| !(tj > 0.0 && tj.is_finite())) {
        return Err(ExactError::Invalid(format!("t must be positive and finite, got {bad}")));
    }
    let xs: Vec<f64> = t.iter().map(|&tj| k as f64 / tj).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for term in f.terms() {
        let mut v = term.coeff.to_complex64();
        for (j, ((&x, mu), &p)) in xs.iter().zip(&term.poles).zip(&term.orders).enumerate() {
            let mu = mu.to_complex64();
            let shifted = Complex64::new(x - mu.re, -mu.im);
            if shifted.re == 0.0 && shifted.im == 0.0 {
                return Err(ExactError::Pole { coord: j });
            }
            let ratio =
                if mu.im == 0.0 { Complex64::new(x / shifted.re, 0.0) } else { Complex64::new(x, 0.0) / shifted };
            let binom = rising_over_factorial(p, k);
            v *= ratio.powi(k as i32 + 1) * binom;
            if p > 1 {
                v /= shifted.powi(p as i32 - 1);
            }
        }
        acc += v;
    }
    Ok(acc)
}

/// `(p)_k / k! = C(p+k−1, k)` as a float product that is exact for `p = 1`.
fn rising_over_factorial(p: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (p + i) as f64 / (1 + i) as f64)
}
