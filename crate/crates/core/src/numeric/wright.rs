use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::quadrature::adaptive_1d;
use super::NumericError;

/// Largest argument accepted by [`wright_eval`].
pub const WRIGHT_MAX_ARG: f64 = 1.0e3;

/// Below this argument the power series is used; above it the integral form.
const SERIES_SWITCH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightParams {
    /// Order γ in (0, 1).
    pub gamma: f64,
    /// Relative tolerance for series truncation and for the integral form.
    pub tol: f64,
    pub max_terms: usize,
}

impl WrightParams {
    pub fn new(gamma: f64) -> Result<Self, NumericError> {
        let p = Self { gamma, tol: 1e-16, max_terms: 200 };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), NumericError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(NumericError::InvalidParameter(format!("gamma must lie in (0,1), got {}", self.gamma)));
        }
        if !(self.tol > 0.0) || self.max_terms == 0 {
            return Err(NumericError::InvalidParameter("tol and max_terms must be positive".into()));
        }
        Ok(())
    }
}

/// Neumaier's compensated summation.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Power series `Σ_k (−s)^k / (k!·Γ(1−γ−γk))`.
///
/// The reciprocal gamma is rewritten by reflection as
/// `Γ(γ(k+1))·sin(πγ(k+1))/π`, so every term is formed in log space and only
/// its sign comes from the sine. Terms alternate and grow before they decay,
/// so cancellation limits this to moderate `s`.
pub fn wright_series(p: &WrightParams, s: f64) -> Result<f64, NumericError> {
    p.validate()?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(NumericError::OutOfRange { arg: s, max: WRIGHT_MAX_ARG });
    }
    let g = p.gamma;
    if s == 0.0 {
        return Ok((ln_gamma(g).exp()) * (PI * g).sin() / PI);
    }
    let ln_s = s.ln();
    let mut acc = CompensatedSum::default();
    let mut prev_mag = f64::INFINITY;
    for k in 0..p.max_terms {
        let a = g * (k + 1) as f64;
        let ln_mag = k as f64 * ln_s - ln_gamma(k as f64 + 1.0) + ln_gamma(a) - PI.ln();
        let mag = ln_mag.exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * mag * (PI * a).sin());
        let total = acc.value().abs();
        if k > 0 && mag < prev_mag && mag <= p.tol * total.max(f64::MIN_POSITIVE) {
            return Ok(acc.value());
        }
        prev_mag = mag;
    }
    Err(NumericError::OutOfRange { arg: s, max: SERIES_SWITCH })
}

/// Integral form for `s > 0`:
///
/// `Φ_γ(s) = s^{γ/(1−γ)} / (π(1−γ)) ∫₀^π A(u)·exp(−s^{1/(1−γ)} A(u)) du`,
/// `A(u) = sin(γu)^{γ/(1−γ)} sin((1−γ)u) / sin(u)^{1/(1−γ)}`.
///
/// The integrand is positive, so there is no cancellation.
pub fn wright_integral(gamma: f64, s: f64, rel_tol: f64) -> f64 {
    let p = 1.0 / (1.0 - gamma);
    let q = gamma * p;
    let w = s.powf(p);
    let kernel = |u: f64| -> f64 {
        let a = (gamma * u).sin().powf(q) * ((1.0 - gamma) * u).sin() / u.sin().powf(p);
        if !a.is_finite() {
            return 0.0;
        }
        a * (-w * a).exp()
    };
    let prefactor = s.powf(q) / (PI * (1.0 - gamma));
    // exp(−wA) carries relative rounding error of order wA·ε
    let floor = 4.0 * w * (1.0 - gamma) * gamma.powf(q) * f64::EPSILON;
    let (v, _) = adaptive_1d(&kernel, 0.0, PI, 16, 1e-18 / prefactor, rel_tol.max(1e-15).max(floor));
    prefactor * v
}

/// `Φ_γ(s)` on `[0, WRIGHT_MAX_ARG]`.
pub fn wright_eval(p: &WrightParams, s: f64) -> Result<f64, NumericError> {
    p.validate()?;
    if !(0.0..=WRIGHT_MAX_ARG).contains(&s) {
        return Err(NumericError::OutOfRange { arg: s, max: WRIGHT_MAX_ARG });
    }
    if s <= SERIES_SWITCH {
        if let Ok(v) = wright_series(p, s) {
            return Ok(v);
        }
    }
    if s == 0.0 {
        return wright_series(p, s);
    }
    Ok(wright_integral(p.gamma, s, p.tol))
}

/// Tail bound `Φ_γ(s) ≤ C·e^{−c s^p}` with `p = 1/(1−γ)`.
///
/// The sharp rate is `(1−γ)γ^{γ/(1−γ)}`; half of it is used so that the
/// algebraic prefactor is absorbed into `C`, which is then measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightTail {
    pub gamma: f64,
    pub exponent: f64,
    pub rate: f64,
    pub constant: f64,
}

impl WrightTail {
    pub fn estimate(gamma: f64) -> Result<Self, NumericError> {
        let params = WrightParams::new(gamma)?;
        let exponent = 1.0 / (1.0 - gamma);
        let sharp = (1.0 - gamma) * gamma.powf(gamma / (1.0 - gamma));
        let rate = 0.5 * sharp;
        let s_hi = (600.0 / sharp).powf(1.0 / exponent).min(WRIGHT_MAX_ARG);
        let mut worst = 0.0f64;
        for i in 0..=400 {
            let s = s_hi * i as f64 / 400.0;
            let v = wright_eval(&params, s)?;
            worst = worst.max(v * (rate * s.powf(exponent)).exp());
        }
        Ok(Self { gamma, exponent, rate, constant: 1.1 * worst })
    }

    pub fn bound(&self, s: f64) -> f64 {
        self.constant * (-self.rate * s.powf(self.exponent)).exp()
    }

    /// Bound on `∫_S^∞ Φ_γ(s) e^{βs} ds`, valid when `β·S ≤ c S^p / 2`
    /// (infinite otherwise).
    pub fn weighted_tail(&self, big_s: f64, beta: f64) -> f64 {
        let p = self.exponent;
        if !(big_s > 0.0) || beta * big_s > 0.5 * self.rate * big_s.powf(p) {
            return f64::INFINITY;
        }
        let a = 0.5 * self.rate;
        self.constant * (-a * big_s.powf(p)).exp() / (a * p * big_s.powf(p - 1.0))
    }

    /// Smallest integer `S ≥ 1` with `weighted_tail(S, β) ≤ target`.
    pub fn truncation(&self, beta: f64, target: f64) -> f64 {
        let mut hi = 1.0;
        while self.weighted_tail(hi, beta) > target {
            hi *= 2.0;
            if hi > 1e6 {
                return f64::INFINITY;
            }
        }
        let mut lo = hi / 2.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.weighted_tail(mid, beta) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.ceil().max(1.0)
    }
}

/// `∫₀^∞ s^p φ(s) ds` for a density `φ` on `[0,∞)`, truncated where the
/// tail bound of `Φ_γ` makes the remainder negligible. With `φ = Φ_γ` the
/// exact value is `Γ(p+1)/Γ(γp+1)`.
pub fn wright_moment_with<F: Fn(f64) -> f64>(phi: F, gamma: f64, p: u32, tol: f64) -> Result<f64, NumericError> {
    let tail = WrightTail::estimate(gamma)?;
    // s^p ≤ p!·e^s
    let fact: f64 = (1..=p).map(f64::from).product();
    let s_max = tail.truncation(1.0, tol / (2.0 * fact)).min(WRIGHT_MAX_ARG);
    let f = |s: f64| s.powi(p as i32) * phi(s);
    let (v, _) = adaptive_1d(&f, 0.0, s_max, 32, tol / 4.0, 1e-13);
    Ok(v)
}

/// Moments of `Φ_γ` itself.
pub fn wright_moment(gamma: f64, p: u32, tol: f64) -> Result<f64, NumericError> {
    let params = WrightParams::new(gamma)?;
    wright_moment_with(|s| wright_eval(&params, s).unwrap_or(f64::NAN), gamma, p, tol)
}
