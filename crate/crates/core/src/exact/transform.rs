use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;

use super::dd::CDd;
use super::partial_fraction::{factorial, split_pole_product};
use super::{ExactError, ExpMonomial, ExpPolynomial, GaussianRational, IndexSubset};

/// One pole term `coeff / ∏_j (λ_j − poles_j)^{orders_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PoleTerm {
    pub coeff: GaussianRational,
    pub poles: Vec<GaussianRational>,
    pub orders: Vec<u32>,
}

/// Finite sum of pole terms in canonical (partial-fraction) form.
///
/// Every term has all orders `≥ 1`, no two terms share the same
/// `(poles, orders)` key and zero coefficients are dropped. Because partial
/// fraction expansions are unique, structural equality of two normalized
/// transforms is equality of the rational functions.
const CANCELLATION_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalTransform {
    dim: usize,
    terms: Vec<PoleTerm>,
}

type TermKey = (Vec<GaussianRational>, Vec<u32>);

fn accumulate(map: &mut BTreeMap<TermKey, GaussianRational>, key: TermKey, c: GaussianRational) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(acc) => {
            *acc = &*acc + &c;
            if acc.is_zero() {
                map.remove(&key);
            }
        }
        None => {
            map.insert(key, c);
        }
    }
}

impl RationalTransform {
    pub fn new(dim: usize, terms: Vec<PoleTerm>) -> Result<Self, ExactError> {
        if dim == 0 {
            return Err(ExactError::Invalid("dimension must be at least 1".into()));
        }
        let mut map = BTreeMap::new();
        for t in terms {
            if t.poles.len() != dim || t.orders.len() != dim {
                return Err(ExactError::DimensionMismatch { expected: dim, found: t.poles.len().max(t.orders.len()) });
            }
            if t.orders.contains(&0) {
                return Err(ExactError::Invalid("pole orders must be at least 1".into()));
            }
            accumulate(&mut map, (t.poles, t.orders), t.coeff);
        }
        Ok(Self::from_map(dim, map))
    }

    fn from_map(dim: usize, map: BTreeMap<TermKey, GaussianRational>) -> Self {
        let terms = map.into_iter().map(|((poles, orders), coeff)| PoleTerm { coeff, poles, orders }).collect();
        Self { dim, terms }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    /// `1 / ∏_j λ_j`, the transform of the constant function 1.
    pub fn inverse_lambdas(dim: usize) -> Self {
        Self {
            dim,
            terms: vec![PoleTerm {
                coeff: GaussianRational::one(),
                poles: vec![GaussianRational::zero(); dim],
                orders: vec![1; dim],
            }],
        }
    }

    /// Builds `Σ_m c_m λ^{β_m} / λ^{denom}` where every numerator exponent is
    /// strictly below the matching denominator power, so each quotient is a
    /// pure pole term at the origin.
    pub fn from_polynomial_over_powers(
        numerator: &[(GaussianRational, Vec<u32>)],
        denom: &[u32],
    ) -> Result<Self, ExactError> {
        let dim = denom.len();
        let mut terms = Vec::with_capacity(numerator.len());
        for (c, exps) in numerator {
            if exps.len() != dim {
                return Err(ExactError::DimensionMismatch { expected: dim, found: exps.len() });
            }
            if exps.iter().zip(denom).any(|(e, d)| e >= d) {
                return Err(ExactError::Invalid(
                    "numerator degree must stay below the denominator power in every coordinate".into(),
                ));
            }
            terms.push(PoleTerm {
                coeff: c.clone(),
                poles: vec![GaussianRational::zero(); dim],
                orders: exps.iter().zip(denom).map(|(e, d)| d - e).collect(),
            });
        }
        Self::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_dim(&self, other: usize) -> Result<(), ExactError> {
        if self.dim != other {
            return Err(ExactError::DimensionMismatch { expected: self.dim, found: other });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_dim(other.dim)?;
        let mut map = BTreeMap::new();
        for t in self.terms.iter().chain(&other.terms) {
            accumulate(&mut map, (t.poles.clone(), t.orders.clone()), t.coeff.clone());
        }
        Ok(Self::from_map(self.dim, map))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&other.scale(&GaussianRational::from_integer(-1)))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|t| PoleTerm { coeff: &t.coeff * c, ..t.clone() }).collect(),
        }
    }

    /// Product of two transforms of the same dimension.
    pub fn mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_dim(other.dim)?;
        self.mul_embedded(other, &IndexSubset::full(self.dim))
    }

    /// `self(λ) · factor(λ_{j₁}, …, λ_{j_l})` where `subset = {j₁ < … < j_l}`
    /// and `factor` has dimension `l`.
    pub fn mul_embedded(&self, factor: &Self, subset: &IndexSubset) -> Result<Self, ExactError> {
        if factor.dim != subset.len() {
            return Err(ExactError::InvalidSubset(format!(
                "factor has dimension {} but subset has {} coordinates",
                factor.dim,
                subset.len()
            )));
        }
        if subset.max_index() >= self.dim {
            return Err(ExactError::InvalidSubset(format!(
                "subset {:?} exceeds dimension {}",
                subset.coords(),
                self.dim
            )));
        }
        let mut map = BTreeMap::new();
        for a in &self.terms {
            for b in &factor.terms {
                let per_coord: Vec<Vec<(GaussianRational, u32, GaussianRational)>> = (0..self.dim)
                    .map(|j| match subset.position(j) {
                        Some(i) => split_pole_product(&a.poles[j], a.orders[j], &b.poles[i], b.orders[i]),
                        None => vec![(a.poles[j].clone(), a.orders[j], GaussianRational::one())],
                    })
                    .collect();
                let base = &a.coeff * &b.coeff;
                tensor_expand(&per_coord, base, &mut map);
            }
        }
        Ok(Self::from_map(self.dim, map))
    }

    /// Divides by `∏_j λ_j` (transform of the iterated antiderivative).
    pub fn div_by_lambdas(&self) -> Self {
        self.mul(&Self::inverse_lambdas(self.dim)).expect("same dimension")
    }

    pub fn eval_exact(&self, lambda: &[GaussianRational]) -> Result<GaussianRational, ExactError> {
        self.check_dim(lambda.len())?;
        let mut acc = GaussianRational::zero();
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for (j, ((l, mu), &p)) in lambda.iter().zip(&t.poles).zip(&t.orders).enumerate() {
                let d = l - mu;
                if d.is_zero() {
                    return Err(ExactError::Pole { coord: j });
                }
                v = v * d.powi(-(p as i64))?;
            }
            acc = acc + v;
        }
        Ok(acc)
    }

    /// Floating-point evaluation. When the pole terms cancel by more than
    /// three orders of magnitude the sum is redone in double-double.
    pub fn eval(&self, lambda: &[Complex64]) -> Result<Complex64, ExactError> {
        self.check_dim(lambda.len())?;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for t in &self.terms {
            let mut v = t.coeff.to_complex64();
            for (j, ((l, mu), &p)) in lambda.iter().zip(&t.poles).zip(&t.orders).enumerate() {
                let d = l - mu.to_complex64();
                if d.re == 0.0 && d.im == 0.0 {
                    return Err(ExactError::Pole { coord: j });
                }
                v /= d.powi(p as i32);
            }
            mass += v.norm();
            acc += v;
        }
        if mass > CANCELLATION_LIMIT * acc.norm() {
            return Ok(self.eval_compensated(lambda));
        }
        Ok(acc)
    }

    fn eval_compensated(&self, lambda: &[Complex64]) -> Complex64 {
        let lam: Vec<CDd> = lambda.iter().map(|z| CDd::from_complex64(*z)).collect();
        let mut acc = CDd::zero();
        for t in &self.terms {
            let mut den = CDd::from_complex64(Complex64::new(1.0, 0.0));
            for ((l, mu), &p) in lam.iter().zip(&t.poles).zip(&t.orders) {
                den = den * (*l - CDd::from_gaussian(mu)).powu(p);
            }
            acc = acc + CDd::from_gaussian(&t.coeff) / den;
        }
        acc.to_complex64()
    }

    /// Exp-polynomial whose transform is `self`: each pole term
    /// `c/∏(λ_j−μ_j)^{p_j}` becomes `c·∏ t_j^{p_j−1} e^{μ_j t_j}/(p_j−1)!`.
    pub fn inverse(&self) -> ExpPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let denom = t.orders.iter().fold(num_bigint::BigInt::from(1), |acc, &p| acc * factorial(p - 1));
                let inv = BigRational::new(1.into(), denom);
                ExpMonomial {
                    coeff: t.coeff.scale(&inv),
                    powers: t.orders.iter().map(|p| p - 1).collect(),
                    rates: t.poles.clone(),
                }
            })
            .collect();
        ExpPolynomial::new(self.dim, terms).expect("pole terms have consistent dimension")
    }

    /// Per-coordinate abscissa `max Re μ_j` over all terms; the source
    /// function's transform converges absolutely on `{Re λ_j > abscissa_j}`.
    pub fn abscissa(&self) -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; self.dim];
        for t in &self.terms {
            for (o, mu) in out.iter_mut().zip(&t.poles) {
                *o = o.max(super::gaussian::rational_to_f64(&mu.re));
            }
        }
        out
    }
}

/// Cartesian expansion of per-coordinate partial-fraction lists into `map`.
fn tensor_expand(
    per_coord: &[Vec<(GaussianRational, u32, GaussianRational)>],
    base: GaussianRational,
    map: &mut BTreeMap<TermKey, GaussianRational>,
) {
    let dim = per_coord.len();
    let mut idx = vec![0usize; dim];
    loop {
        let mut c = base.clone();
        let mut poles = Vec::with_capacity(dim);
        let mut orders = Vec::with_capacity(dim);
        for (j, &i) in idx.iter().enumerate() {
            let (pole, ord, k) = &per_coord[j][i];
            c = c * k;
            poles.push(pole.clone());
            orders.push(*ord);
        }
        accumulate(map, (poles, orders), c);
        // odometer increment
        let mut j = dim;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < per_coord[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}
