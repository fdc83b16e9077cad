use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{adaptive_box, axis_rule, tensor_integrate};
use super::{FunctionDescriptor, NumericError};

/// Default upper limit on tensor nodes per refinement level.
pub const DEFAULT_MAX_NODES: usize = 1 << 24;

/// Numerical transform value with its error record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformValue {
    pub value: Complex64,
    /// Quadrature estimate plus tail bound.
    pub abs_error: f64,
    /// Side lengths `T_j` of the integration box `∏ [0, T_j]`.
    pub truncation: Vec<f64>,
    /// Final panel count per axis.
    pub panels: Vec<usize>,
}

fn check_dim(f: &FunctionDescriptor, lambda: &[Complex64]) -> Result<(), NumericError> {
    if lambda.len() != f.dim() {
        return Err(NumericError::DimensionMismatch { expected: f.dim(), found: lambda.len() });
    }
    Ok(())
}

/// Truncation box and tail bound for `tol`.
///
/// The complement of `∏[0,T_j]` is covered by the slabs `{t_j > T_j}`, and on
/// each slab the growth hint integrates to `M·P·e^{−c_j T_j}` with
/// `c_j = Re λ_j − ω_j` and `P = ∏ 1/c_i`. Each slab gets `tol/(2n)`.
fn truncation(f: &FunctionDescriptor, lambda: &[Complex64], tol: f64) -> Result<(Vec<f64>, f64), NumericError> {
    if let Some(up) = f.support() {
        return Ok((up.to_vec(), 0.0));
    }
    let hint = f.growth();
    let mut rates = Vec::with_capacity(lambda.len());
    for (j, (l, &w)) in lambda.iter().zip(&hint.omega).enumerate() {
        let c = l.re - w;
        if !(c > 0.0) {
            return Err(NumericError::OutsideRegion { coord: j, re_lambda: l.re, omega: w });
        }
        rates.push(c);
    }
    let n = lambda.len() as f64;
    let mass = hint.m * rates.iter().map(|c| 1.0 / c).product::<f64>();
    let log_ratio = (2.0 * n * mass / tol).ln();
    let upper: Vec<f64> = rates.iter().map(|&c| (log_ratio / c).max(1.0 / c)).collect();
    let tail = rates.iter().zip(&upper).map(|(&c, &t)| mass * (-c * t).exp()).sum();
    Ok((upper, tail))
}

/// `∫_{[0,∞)^n} e^{−λ·t} f(t) dt` with an absolute error bound `≤ tol`.
///
/// The box comes from the growth hint (or the support hint, which waives the
/// `Re λ_j > ω_j` requirement), and the panel count per axis is doubled until
/// two levels agree to `tol/2`.
pub fn laplace_numeric(f: &FunctionDescriptor, lambda: &[Complex64], tol: f64) -> Result<TransformValue, NumericError> {
    laplace_numeric_with_budget(f, lambda, tol, DEFAULT_MAX_NODES)
}

/// [`laplace_numeric`] with an explicit cap on tensor nodes per level.
pub fn laplace_numeric_with_budget(
    f: &FunctionDescriptor,
    lambda: &[Complex64],
    tol: f64,
    max_nodes: usize,
) -> Result<TransformValue, NumericError> {
    check_dim(f, lambda)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(NumericError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let (upper, tail) = truncation(f, lambda, tol)?;
    let start: Vec<usize> = upper
        .iter()
        .zip(lambda)
        .map(|(&t, l)| {
            let scale = 1.0 + l.norm() + f.growth().omega.iter().fold(0.0f64, |a, w| a.max(w.abs()));
            ((t * scale / 8.0).ceil() as usize).clamp(2, 4096)
        })
        .collect();
    let integrand = |t: &[f64]| {
        let phase: Complex64 = lambda.iter().zip(t).map(|(l, &x)| -l * x).sum();
        phase.exp() * f.eval_unchecked(t)
    };
    let grade = if f.is_rough_at_origin() { 3 } else { 0 };
    match adaptive_box(&integrand, &upper, &start, grade, 0.5 * tol, max_nodes) {
        Ok(q) => Ok(TransformValue {
            value: q.value,
            abs_error: q.error_estimate + tail,
            truncation: upper,
            panels: q.panels,
        }),
        Err(q) => Err(NumericError::BudgetExceeded {
            best: TransformValue {
                value: q.value,
                abs_error: q.error_estimate + tail,
                truncation: upper,
                panels: q.panels,
            },
        }),
    }
}

/// Default cube sides for [`region_probe_b`]: `2^0, …, 2^6`.
pub const DEFAULT_PROBE_SCHEDULE: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// Finite evidence about boundedness of the partial Laplace integrals.
///
/// This is evidence only: a bounded verdict on a finite schedule does not
/// prove membership in the boundedness region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionProbe {
    pub bounded: bool,
    pub max_magnitude: f64,
    /// `(cube side, |partial integral|)` per schedule entry.
    pub partials: Vec<(f64, f64)>,
    pub label: String,
}

/// Partial integrals `∫_{[0,T]^n} e^{−λ·t} f(t) dt` over the schedule of cube
/// sides. The sequence counts as bounded when the largest magnitude over the
/// later half of the schedule is at most twice the largest over the earlier
/// half, or when the last two partial integrals agree to 1e-6 relative.
pub fn region_probe_b(f: &FunctionDescriptor, lambda: &[Complex64], schedule: &[f64]) -> RegionProbe {
    let mut partials = Vec::with_capacity(schedule.len());
    let integrand = |t: &[f64]| {
        let phase: Complex64 = lambda.iter().zip(t).map(|(l, &x)| -l * x).sum();
        phase.exp() * f.eval_unchecked(t)
    };
    let dims_ok = lambda.len() == f.dim();
    for &side in schedule {
        if !dims_ok || !(side > 0.0) {
            partials.push((side, f64::NAN));
            continue;
        }
        let upper: Vec<f64> = match f.support() {
            Some(up) => up.iter().map(|&u| u.min(side)).collect(),
            None => vec![side; f.dim()],
        };
        let start: Vec<usize> = upper
            .iter()
            .zip(lambda)
            .map(|(&t, l)| ((t * (1.0 + l.norm()) / 4.0).ceil() as usize).clamp(1, 1024))
            .collect();
        let coarse: Vec<Vec<(f64, f64)>> = upper.iter().zip(&start).map(|(&t, &p)| axis_rule(0.0, t, p, 0)).collect();
        let scale = tensor_integrate(&integrand, &coarse).norm().max(1.0);
        let value = match adaptive_box(&integrand, &upper, &start, 0, 1e-9 * scale, 1 << 22) {
            Ok(q) | Err(q) => q.value,
        };
        partials.push((side, value.norm()));
    }
    let mags: Vec<f64> = partials.iter().map(|p| p.1).collect();
    let max_magnitude = mags.iter().cloned().fold(0.0f64, f64::max);
    let bounded = if mags.iter().any(|m| !m.is_finite()) || mags.is_empty() {
        false
    } else {
        let split = mags.len() / 2;
        let early = mags[..split.max(1)].iter().cloned().fold(0.0f64, f64::max);
        let late = mags[split..].iter().cloned().fold(0.0f64, f64::max);
        let settled = match mags.len() {
            0 | 1 => false,
            k => (mags[k - 1] - mags[k - 2]).abs() <= 1e-6 * mags[k - 1].max(f64::MIN_POSITIVE),
        };
        settled || late <= 2.0 * early + f64::MIN_POSITIVE
    };
    RegionProbe { bounded, max_magnitude, partials, label: "evidence".into() }
}
