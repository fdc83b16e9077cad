use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use super::partial_fraction::factorial;
use super::transform::PoleTerm;
use super::{ExactError, GaussianRational, IndexSubset, RationalTransform};

/// `coeff · ∏_j t_j^{powers_j} e^{rates_j t_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpMonomial {
    pub coeff: GaussianRational,
    pub powers: Vec<u32>,
    pub rates: Vec<GaussianRational>,
}

impl ExpMonomial {
    pub fn dim(&self) -> usize {
        self.powers.len()
    }

    pub fn eval(&self, t: &[f64]) -> Complex64 {
        let mut v = self.coeff.to_complex64();
        for ((&tj, &a), mu) in t.iter().zip(&self.powers).zip(&self.rates) {
            let mu = mu.to_complex64();
            v *= (mu * tj).exp() * tj.powi(a as i32);
        }
        v
    }
}

/// Finite sum of [`ExpMonomial`]s on `[0,∞)^dim`, kept in canonical form:
/// like terms merged, zero coefficients dropped, terms sorted by `(rates, powers)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpPolynomial {
    dim: usize,
    terms: Vec<ExpMonomial>,
}

type TermKey = (Vec<GaussianRational>, Vec<u32>);

impl ExpPolynomial {
    pub fn new(dim: usize, terms: Vec<ExpMonomial>) -> Result<Self, ExactError> {
        if dim == 0 {
            return Err(ExactError::Invalid("dimension must be at least 1".into()));
        }
        let mut map: BTreeMap<TermKey, GaussianRational> = BTreeMap::new();
        for m in terms {
            if m.powers.len() != dim || m.rates.len() != dim {
                return Err(ExactError::DimensionMismatch { expected: dim, found: m.powers.len().max(m.rates.len()) });
            }
            let key = (m.rates, m.powers);
            let c = match map.remove(&key) {
                Some(prev) => prev + m.coeff,
                None => m.coeff,
            };
            if !c.is_zero() {
                map.insert(key, c);
            }
        }
        let terms = map.into_iter().map(|((rates, powers), coeff)| ExpMonomial { coeff, powers, rates }).collect();
        Ok(Self { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        Self::new(dim, vec![ExpMonomial { coeff: c, powers: vec![0; dim], rates: vec![GaussianRational::zero(); dim] }])
            .expect("valid constant")
    }

    pub fn monomial(
        coeff: GaussianRational,
        powers: Vec<u32>,
        rates: Vec<GaussianRational>,
    ) -> Result<Self, ExactError> {
        let dim = powers.len();
        Self::new(dim, vec![ExpMonomial { coeff, powers, rates }])
    }

    /// `e^{μ·t}`.
    pub fn exponential(rates: Vec<GaussianRational>) -> Self {
        let dim = rates.len();
        Self::monomial(GaussianRational::one(), vec![0; dim], rates).expect("consistent")
    }

    /// `t^α` (no exponential factor).
    pub fn power(powers: Vec<u32>) -> Self {
        let dim = powers.len();
        Self::monomial(GaussianRational::one(), powers, vec![GaussianRational::zero(); dim]).expect("consistent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[ExpMonomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_dim(&self, found: usize) -> Result<(), ExactError> {
        if self.dim != found {
            return Err(ExactError::DimensionMismatch { expected: self.dim, found });
        }
        Ok(())
    }

    /// Floating-point evaluation at `t`.
    pub fn eval(&self, t: &[f64]) -> Result<Complex64, ExactError> {
        self.check_dim(t.len())?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &[f64]) -> Complex64 {
        self.terms.iter().map(|m| m.eval(t)).sum()
    }

    /// Per monomial, `L[t^a e^{μt}](λ) = a!/(λ−μ)^{a+1}`, tensorized.
    pub fn laplace(&self) -> RationalTransform {
        let terms = self
            .terms
            .iter()
            .map(|m| {
                let fact = m.powers.iter().fold(BigInt::from(1), |acc, &a| acc * factorial(a));
                PoleTerm {
                    coeff: m.coeff.scale(&BigRational::from_integer(fact)),
                    poles: m.rates.clone(),
                    orders: m.powers.iter().map(|a| a + 1).collect(),
                }
            })
            .collect();
        RationalTransform::new(self.dim, terms).expect("monomials map to valid pole terms")
    }

    pub fn convolve(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_dim(other.dim)?;
        Ok(self.laplace().mul(&other.laplace())?.inverse())
    }

    /// Convolution of `self` (dim `n`) with `kernel` (dim `l`) in the
    /// coordinates of `subset` only; other coordinates pass through.
    pub fn convolve_partial(&self, kernel: &Self, subset: &IndexSubset) -> Result<Self, ExactError> {
        if kernel.dim > self.dim {
            return Err(ExactError::InvalidSubset(format!("kernel dimension {} exceeds {}", kernel.dim, self.dim)));
        }
        Ok(self.laplace().mul_embedded(&kernel.laplace(), subset)?.inverse())
    }

    pub fn antiderivative(&self) -> Self {
        self.laplace().div_by_lambdas().inverse()
    }

    /// Exact `∂/∂t_j`.
    pub fn partial_derivative(&self, j: usize) -> Result<Self, ExactError> {
        if j >= self.dim {
            return Err(ExactError::InvalidSubset(format!("coordinate {j} out of range")));
        }
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for m in &self.terms {
            let a = m.powers[j];
            if a > 0 {
                let mut d = m.clone();
                d.coeff = &m.coeff * &GaussianRational::from_integer(a as i64);
                d.powers[j] = a - 1;
                out.push(d);
            }
            if !m.rates[j].is_zero() {
                let mut d = m.clone();
                d.coeff = &m.coeff * &m.rates[j];
                out.push(d);
            }
        }
        Self::new(self.dim, out)
    }

    /// Mixed partial `∂^n / ∂t_1 … ∂t_n`.
    pub fn mixed_partial(&self) -> Self {
        (0..self.dim).fold(self.clone(), |acc, j| acc.partial_derivative(j).expect("in range"))
    }

    /// Outer product `(f ⊗ g)(s, t) = f(s)·g(t)` of dimension `dim_f + dim_g`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(ExpMonomial {
                    coeff: &a.coeff * &b.coeff,
                    powers: a.powers.iter().chain(&b.powers).copied().collect(),
                    rates: a.rates.iter().chain(&b.rates).cloned().collect(),
                });
            }
        }
        Self::new(self.dim + other.dim, out).expect("consistent dimensions")
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let terms = self.terms.iter().map(|m| ExpMonomial { coeff: &m.coeff * c, ..m.clone() }).collect();
        Self::new(self.dim, terms).expect("consistent")
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_dim(other.dim)?;
        Self::new(self.dim, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&-other)
    }

    /// Growth bound `|f(t)| ≤ M·e^{ω·t}` from `t^a e^{−εt} ≤ (a/(eε))^a`,
    /// with `ω_j = max Re μ_j + ε`.
    pub fn growth_bound(&self, eps: f64) -> (f64, Vec<f64>) {
        assert!(eps > 0.0, "eps must be positive");
        let mut m = 0.0;
        let mut omega = vec![f64::NEG_INFINITY; self.dim];
        for term in &self.terms {
            let mut factor = term.coeff.to_complex64().norm();
            for (j, (&a, mu)) in term.powers.iter().zip(&term.rates).enumerate() {
                if a > 0 {
                    factor *= (a as f64 / (std::f64::consts::E * eps)).powi(a as i32);
                }
                omega[j] = omega[j].max(mu.to_complex64().re + eps);
            }
            m += factor;
        }
        for w in &mut omega {
            if !w.is_finite() {
                *w = eps;
            }
        }
        // pad for rounding in the float bound itself
        ((m * (1.0 + 1e-12)).max(1.0), omega)
    }
}

/// `g_k(t) = t^{k−1}/(k−1)!` in one variable, `k ≥ 1`.
pub fn g_k(k: u32) -> ExpPolynomial {
    assert!(k >= 1, "g_k is defined for k >= 1");
    let coeff =
        GaussianRational::new(BigRational::new(1.into(), factorial(k - 1)), BigRational::from_integer(0.into()));
    ExpPolynomial::monomial(coeff, vec![k - 1], vec![GaussianRational::zero()]).expect("1-d")
}

impl Neg for &ExpPolynomial {
    type Output = ExpPolynomial;
    fn neg(self) -> ExpPolynomial {
        self.scale(&GaussianRational::from_integer(-1))
    }
}

impl Add for &ExpPolynomial {
    type Output = ExpPolynomial;
    /// Panics on dimension mismatch; see [`ExpPolynomial::checked_add`].
    fn add(self, o: &ExpPolynomial) -> ExpPolynomial {
        self.checked_add(o).expect("dimension mismatch in exp-polynomial addition")
    }
}

impl Sub for &ExpPolynomial {
    type Output = ExpPolynomial;
    fn sub(self, o: &ExpPolynomial) -> ExpPolynomial {
        self.checked_sub(o).expect("dimension mismatch in exp-polynomial subtraction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{antiderivative, conv_full, conv_partial, laplace_exact};

    fn gr(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn one(dim: usize) -> ExpPolynomial {
        ExpPolynomial::constant(dim, GaussianRational::one())
    }

    fn diagonal() -> ExpPolynomial {
        &g_k(2).tensor(&g_k(3)) - &g_k(3).tensor(&g_k(2))
    }

    #[test]
    fn eval_examples() {
        assert_eq!(one(1).eval(&[3.7]).unwrap(), Complex64::new(1.0, 0.0));
        let f = ExpPolynomial::monomial(gr(1), vec![1], vec![gr(-1)]).unwrap();
        assert_eq!(f.eval(&[0.0]).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(diagonal().eval(&[1.0, 1.0]).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(diagonal().eval(&[1.0, 2.0]).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(diagonal().eval(&[1.0]), Err(ExactError::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn laplace_examples() {
        let f = ExpPolynomial::exponential(vec![gr(-2)]);
        let expected =
            RationalTransform::new(1, vec![PoleTerm { coeff: gr(1), poles: vec![gr(-2)], orders: vec![1] }]).unwrap();
        assert_eq!(laplace_exact(&f), expected);

        // t e^{it} -> 1/(λ-i)^2
        let f = ExpPolynomial::monomial(gr(1), vec![1], vec![GaussianRational::i()]).unwrap();
        let t = laplace_exact(&f);
        assert_eq!(t.terms().len(), 1);
        assert_eq!(t.terms()[0].poles, vec![GaussianRational::i()]);
        assert_eq!(t.terms()[0].orders, vec![2]);
        assert_eq!(t.terms()[0].coeff, gr(1));

        // diagonal witness: (λ1 − λ2)/(λ1³λ2³)
        let stated =
            RationalTransform::from_polynomial_over_powers(&[(gr(1), vec![1, 0]), (gr(-1), vec![0, 1])], &[3, 3])
                .unwrap();
        assert_eq!(laplace_exact(&diagonal()), stated);
    }

    #[test]
    fn convolution_examples() {
        assert_eq!(conv_full(&one(1), &one(1)).unwrap(), ExpPolynomial::power(vec![1]));
        let t = ExpPolynomial::power(vec![1]);
        assert_eq!(conv_full(&t, &t).unwrap(), ExpPolynomial::power(vec![3]).scale(&GaussianRational::ratio(1, 6)));
        let e1 = ExpPolynomial::exponential(vec![gr(-1)]);
        let e2 = ExpPolynomial::exponential(vec![gr(-2)]);
        assert_eq!(conv_full(&e1, &e2).unwrap(), &e1 - &e2);
        assert!(conv_full(&e1, &one(2)).is_err());
    }

    #[test]
    fn partial_convolution_examples() {
        let u = ExpPolynomial::power(vec![1, 1]);
        let d1 = IndexSubset::new(vec![0], 2).unwrap();
        let r = conv_partial(&one(1), &u, &d1).unwrap();
        assert_eq!(r, ExpPolynomial::power(vec![2, 1]).scale(&GaussianRational::ratio(1, 2)));

        let f = ExpPolynomial::monomial(gr(3), vec![1, 0], vec![gr(-1), GaussianRational::i()]).unwrap();
        let g = ExpPolynomial::monomial(gr(-2), vec![0, 2], vec![gr(0), gr(1)]).unwrap();
        assert_eq!(conv_partial(&f, &g, &IndexSubset::full(2)).unwrap(), conv_full(&f, &g).unwrap());

        let a = ExpPolynomial::exponential(vec![gr(-1)]);
        let u = ExpPolynomial::exponential(vec![gr(-1), gr(-1)]);
        let d2 = IndexSubset::new(vec![1], 2).unwrap();
        let r = laplace_exact(&conv_partial(&a, &u, &d2).unwrap());
        for (l1, l2) in [(1, 2), (3, 5), (0, 7)] {
            let lam = [gr(l1), gr(l2)];
            let expect = (&gr(l2) + &gr(1)).inv().unwrap()
                * (&gr(l1) + &gr(1)).inv().unwrap()
                * (&gr(l2) + &gr(1)).inv().unwrap();
            assert_eq!(r.eval_exact(&lam).unwrap(), expect);
        }
        assert!(conv_partial(&one(2), &u, &d2).is_err());
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(antiderivative(&one(2)), ExpPolynomial::power(vec![1, 1]));
        let e = ExpPolynomial::exponential(vec![gr(-1)]);
        assert_eq!(antiderivative(&e), &one(1) - &e);
        let g = antiderivative(&diagonal());
        let expect =
            RationalTransform::from_polynomial_over_powers(&[(gr(1), vec![1, 0]), (gr(-1), vec![0, 1])], &[4, 4])
                .unwrap();
        assert_eq!(laplace_exact(&g), expect);
        assert_eq!(g.eval(&[0.0, 0.0]).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn derivative_inverts_antiderivative() {
        let f = &ExpPolynomial::monomial(gr(2), vec![2, 1], vec![GaussianRational::complex(-1, 1), gr(0)]).unwrap()
            + &ExpPolynomial::exponential(vec![gr(3), GaussianRational::ratio(-1, 2)]);
        assert_eq!(antiderivative(&f).mixed_partial(), f);
    }

    #[test]
    fn growth_bound_dominates_samples() {
        let f = ExpPolynomial::monomial(gr(3), vec![2], vec![gr(-1)]).unwrap();
        let (m, w) = f.growth_bound(0.5);
        for t in [0.0, 0.5, 2.0, 4.0, 10.0, 30.0] {
            assert!(f.eval(&[t]).unwrap().norm() <= m * (w[0] * t).exp());
        }
    }

    #[test]
    fn g_k_values() {
        assert_eq!(g_k(1), one(1));
        assert_eq!(g_k(3).eval(&[2.0]).unwrap(), Complex64::new(2.0, 0.0));
    }
}
