use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{axis_rule, tensor_integrate};
use super::{wright_eval, FunctionDescriptor, GrowthHint, NumericError, TransformValue, WrightParams, WrightTail};
use crate::exact::IndexSubset;

const MAX_NODES: usize = 1 << 22;

/// Subordinated value with its error record and the Wright tail constants
/// that determined the truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinationValue {
    pub value: Complex64,
    pub abs_error: f64,
    /// Upper limit `S_i` of the `s`-integral per subordinated coordinate.
    pub truncation: Vec<f64>,
    pub panels: Vec<usize>,
    pub tails: Vec<WrightTail>,
}

type NodeKey = (usize, u64, usize);
type NodeTable = Arc<Vec<(f64, f64)>>;
type Axes = Vec<Vec<(f64, f64)>>;

/// Evaluates `G_γ(t) = ∫ ∏_i Φ_{γ_i}(s_i) · G(t with t_{j_i} ↦ s_i t_{j_i}^{γ_i}) ds`
/// over `[0,∞)^{|D|}` for a fixed set of orders.
///
/// Tail constants are measured once at construction, and the Wright-weighted
/// node tables are cached per `(axis, S, panels)`, so repeated evaluations at
/// many `t` only pay for the calls to `G`.
pub struct Subordinator {
    gammas: Vec<f64>,
    tails: Vec<WrightTail>,
    nodes: Mutex<HashMap<NodeKey, NodeTable>>,
}

impl std::fmt::Debug for Subordinator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subordinator").field("gammas", &self.gammas).field("tails", &self.tails).finish()
    }
}

impl Subordinator {
    pub fn new(gammas: &[f64]) -> Result<Self, NumericError> {
        if gammas.is_empty() {
            return Err(NumericError::InvalidParameter("at least one order is required".into()));
        }
        let tails = gammas.iter().map(|&g| WrightTail::estimate(g)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { gammas: gammas.to_vec(), tails, nodes: Mutex::new(HashMap::new()) })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn tails(&self) -> &[WrightTail] {
        &self.tails
    }

    /// Gauss–Legendre nodes on `[0, S]` with weights multiplied by `Φ_γ`.
    fn weighted_nodes(&self, axis: usize, upper: f64, panels: usize) -> Result<NodeTable, NumericError> {
        let key = (axis, upper.to_bits(), panels);
        if let Some(hit) = self.nodes.lock().expect("node cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let params = WrightParams::new(self.gammas[axis])?;
        let table = axis_rule(0.0, upper, panels, 0)
            .into_iter()
            .map(|(s, w)| Ok((s, w * wright_eval(&params, s)?)))
            .collect::<Result<Vec<_>, NumericError>>()?;
        let table = Arc::new(table);
        self.nodes.lock().expect("node cache poisoned").insert(key, table.clone());
        Ok(table)
    }

    /// Upper bound on `∫₀^∞ Φ_γ(s) e^{βs} ds`.
    fn weighted_mass(&self, axis: usize, beta: f64) -> Result<f64, NumericError> {
        if beta <= 0.0 {
            return Ok(1.0);
        }
        let tail = &self.tails[axis];
        let upper = tail.truncation(beta, 1e-12);
        if !upper.is_finite() {
            return Err(NumericError::InvalidParameter(format!("growth rate {beta} too large to subordinate")));
        }
        let panels = (4.0 * upper * (1.0 + beta)).ceil() as usize;
        let nodes = self.weighted_nodes(axis, upper, panels)?;
        let body: f64 = nodes.iter().map(|&(s, w)| w * (beta * s).exp()).sum();
        Ok((body + tail.weighted_tail(upper, beta)) * (1.0 + 1e-6))
    }

    pub fn eval(
        &self,
        g: &FunctionDescriptor,
        subset: &IndexSubset,
        t: &[f64],
        tol: f64,
    ) -> Result<SubordinationValue, NumericError> {
        let n = g.dim();
        if t.len() != n {
            return Err(NumericError::DimensionMismatch { expected: n, found: t.len() });
        }
        if subset.len() != self.gammas.len() {
            return Err(NumericError::DimensionMismatch { expected: self.gammas.len(), found: subset.len() });
        }
        if subset.max_index() >= n {
            return Err(NumericError::InvalidParameter(format!("subset {:?} exceeds dimension {n}", subset.coords())));
        }
        if t.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(NumericError::InvalidParameter(format!("t must be nonnegative and finite, got {t:?}")));
        }
        if !(tol > 0.0) {
            return Err(NumericError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        let coords = subset.coords();
        let hint = g.growth();
        let scales: Vec<f64> = coords.iter().zip(&self.gammas).map(|(&j, &gm)| t[j].powf(gm)).collect();
        let outside: f64 = (0..n).filter(|j| !subset.contains(*j)).map(|j| hint.omega[j] * t[j]).sum();
        let k = hint.m * outside.exp();
        let betas: Vec<f64> = coords.iter().zip(&scales).map(|(&j, &tau)| hint.omega[j].max(0.0) * tau).collect();
        let masses = (0..coords.len()).map(|i| self.weighted_mass(i, betas[i])).collect::<Result<Vec<_>, _>>()?;
        let d = coords.len() as f64;
        let others = |i: usize| -> f64 { (0..masses.len()).filter(|&q| q != i).map(|q| masses[q]).product() };
        let mut upper = Vec::with_capacity(coords.len());
        let mut tail = 0.0;
        for (i, &beta) in betas.iter().enumerate() {
            let target = tol / (2.0 * d * k * others(i));
            let s_max = self.tails[i].truncation(beta, target);
            if !s_max.is_finite() {
                return Err(NumericError::InvalidParameter(format!("growth rate {beta} too large to subordinate")));
            }
            tail += k * others(i) * self.tails[i].weighted_tail(s_max, beta);
            upper.push(s_max);
        }
        let integrand = |s: &[f64]| {
            let mut point = t.to_vec();
            for ((&j, &tau), &si) in coords.iter().zip(&scales).zip(s) {
                point[j] = si * tau;
            }
            g.eval_unchecked(&point)
        };
        let build = |level: usize| -> Result<(Axes, Vec<usize>), NumericError> {
            let panels: Vec<usize> = upper.iter().map(|&u| ((2.0 * u).ceil() as usize).max(4) << level).collect();
            let axes = (0..coords.len())
                .map(|i| self.weighted_nodes(i, upper[i], panels[i]).map(|a| a.as_ref().clone()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((axes, panels))
        };
        let (axes, _) = build(0)?;
        let mut prev = tensor_integrate(&integrand, &axes);
        for level in 1.. {
            let (axes, panels) = build(level)?;
            let cur = tensor_integrate(&integrand, &axes);
            let err = (cur - prev).norm();
            let nodes: usize = axes.iter().map(Vec::len).product();
            if err <= 0.5 * tol {
                return Ok(SubordinationValue {
                    value: cur,
                    abs_error: err + tail,
                    truncation: upper,
                    panels,
                    tails: self.tails.clone(),
                });
            }
            if nodes.saturating_mul(1 << coords.len()) > MAX_NODES {
                return Err(NumericError::BudgetExceeded {
                    best: TransformValue { value: cur, abs_error: err + tail, truncation: upper, panels },
                });
            }
            prev = cur;
        }
        unreachable!()
    }

    /// Descriptor of `G_γ` evaluated pointwise to `tol`.
    ///
    /// Growth hint: coordinates in `D` with `ω_j ≤ 0` become bounded
    /// (`ω' = 0`), and those with `ω_j > 0` get `ω' = ω_j^{1/γ}` with an extra
    /// factor `1/γ` on `M`, from the Mittag-Leffler bound
    /// `∫Φ_γ(s)e^{xs}ds = E_γ(x) ≤ e^{x^{1/γ}}/γ`. Evaluation failures
    /// surface as NaN values.
    pub fn descriptor(
        self: Arc<Self>,
        g: FunctionDescriptor,
        subset: IndexSubset,
        tol: f64,
    ) -> Result<FunctionDescriptor, NumericError> {
        if subset.len() != self.gammas.len() || subset.max_index() >= g.dim() {
            return Err(NumericError::DimensionMismatch { expected: self.gammas.len(), found: subset.len() });
        }
        let mut omega = g.growth().omega.clone();
        let mut m = g.growth().m;
        for (&j, &gm) in subset.coords().iter().zip(&self.gammas) {
            if omega[j] <= 0.0 {
                omega[j] = 0.0;
            } else {
                omega[j] = omega[j].powf(1.0 / gm);
                m /= gm;
            }
        }
        let m = m * (1.0 + 1e-9) + tol;
        let dim = g.dim();
        let evaluator = move |t: &[f64]| match self.eval(&g, &subset, t, tol) {
            Ok(v) => v.value,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        };
        Ok(FunctionDescriptor::new(dim, GrowthHint { m, omega }, evaluator)?.rough_at_origin())
    }
}

/// One-shot subordination at a single point.
pub fn subordinate(
    g: &FunctionDescriptor,
    subset: &IndexSubset,
    gammas: &[f64],
    t: &[f64],
    tol: f64,
) -> Result<SubordinationValue, NumericError> {
    Subordinator::new(gammas)?.eval(g, subset, t, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ExpPolynomial, GaussianRational};
    use statrs::function::erf::erfc;
    use std::f64::consts::PI;

    fn full(dim: usize) -> IndexSubset {
        IndexSubset::full(dim)
    }

    fn exp_decay(rates: &[i64]) -> FunctionDescriptor {
        let f = ExpPolynomial::exponential(rates.iter().map(|&r| GaussianRational::from_integer(r)).collect());
        FunctionDescriptor::from_exppoly(&f, 0.01)
    }

    #[test]
    fn constant_is_preserved() {
        let one =
            FunctionDescriptor::new(1, GrowthHint { m: 1.0, omega: vec![0.0] }, |_: &[f64]| Complex64::new(1.0, 0.0))
                .unwrap();
        for g in [0.3, 0.5, 0.7] {
            let v = subordinate(&one, &full(1), &[g], &[1.7], 1e-9).unwrap();
            assert!((v.value.re - 1.0).abs() < 1e-9, "γ={g}: {:?}", v.value);
            assert!(v.abs_error <= 1e-9);
        }
    }

    #[test]
    fn linear_function_moment() {
        let f = FunctionDescriptor::from_exppoly(&ExpPolynomial::power(vec![1]), 0.1);
        for t in [0.5, 2.0, 3.0] {
            let v = subordinate(&f, &full(1), &[0.5], &[t], 1e-9).unwrap();
            let expect = 2.0 * t.sqrt() / PI.sqrt();
            assert!((v.value.re - expect).abs() < 1e-8, "t={t}: {} vs {expect}", v.value.re);
        }
    }

    #[test]
    fn decaying_exponential_matches_erfc() {
        let f = exp_decay(&[-1]);
        let sub = Subordinator::new(&[0.5]).unwrap();
        for t in [0.0, 0.1, 1.0, 4.0, 9.0] {
            let v = sub.eval(&f, &full(1), &[t], 1e-10).unwrap();
            let expect = t.exp() * erfc(t.sqrt());
            assert!((v.value.re - expect).abs() < 1e-9, "t={t}: {} vs {expect}", v.value.re);
        }
    }

    #[test]
    fn partial_and_joint_subsets() {
        let f = exp_decay(&[-1, -2]);
        let only_second = IndexSubset::new(vec![1], 2).unwrap();
        let (t1, t2) = (0.7, 0.4);
        let v = subordinate(&f, &only_second, &[0.5], &[t1, t2], 1e-10).unwrap();
        let expect = (-t1).exp() * (4.0 * t2).exp() * erfc(2.0 * t2.sqrt());
        assert!((v.value.re - expect).abs() < 1e-9);
        let both = subordinate(&f, &full(2), &[0.5, 0.5], &[t1, t2], 1e-9).unwrap();
        let expect = t1.exp() * erfc(t1.sqrt()) * (4.0 * t2).exp() * erfc(2.0 * t2.sqrt());
        assert!((both.value.re - expect).abs() < 1e-8, "{} vs {expect}", both.value.re);
        assert_eq!(both.truncation.len(), 2);
    }

    #[test]
    fn invalid_inputs() {
        let f = exp_decay(&[-1]);
        assert!(subordinate(&f, &full(1), &[1.2], &[1.0], 1e-6).is_err());
        assert!(subordinate(&f, &full(1), &[0.5], &[-1.0], 1e-6).is_err());
        assert!(subordinate(&f, &full(1), &[0.5, 0.5], &[1.0], 1e-6).is_err());
        assert!(subordinate(&f, &full(1), &[0.5], &[1.0, 2.0], 1e-6).is_err());
    }

    #[test]
    fn descriptor_growth_hint() {
        let sub = Arc::new(Subordinator::new(&[0.5]).unwrap());
        let grow =
            FunctionDescriptor::from_exppoly(&ExpPolynomial::exponential(vec![GaussianRational::ratio(1, 2)]), 0.01);
        let d = sub.clone().descriptor(grow, full(1), 1e-8).unwrap();
        assert!((d.growth().omega[0] - 0.51f64.powi(2)).abs() < 1e-12);
        assert!(d.is_rough_at_origin());
        let decay = sub.descriptor(exp_decay(&[-1]), full(1), 1e-8).unwrap();
        assert_eq!(decay.growth().omega, vec![0.0]);
        let v = decay.eval(&[1.0]).unwrap().re;
        assert!((v - erfc(1.0) * 1f64.exp()).abs() < 1e-8);
    }
}
