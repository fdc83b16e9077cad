//! Deliberately wrong kernels used as negative controls.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::counterexamples::Witness;
use crate::exact::{ExactError, ExpMonomial, ExpPolynomial, IndexSubset, RationalTransform};
use crate::numeric::{wright_eval, WrightParams};
use crate::sequences::{Derivation, SequenceFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Fault {
    /// Convolution whose inverse step forgets the `1/(p−1)!` factors.
    DroppedFactorial,
    /// Wright series with `Γ(1−γk)` in place of `Γ(1−γ−γk)`.
    WrongGammaArgument,
    /// Witness checked against its family shifted by `e₁`.
    WrongWitnessFamily,
}

impl Fault {
    pub const ALL: [Fault; 3] = [Fault::DroppedFactorial, Fault::WrongGammaArgument, Fault::WrongWitnessFamily];

    pub fn name(&self) -> &'static str {
        match self {
            Fault::DroppedFactorial => "dropped-factorial",
            Fault::WrongGammaArgument => "wrong-gamma",
            Fault::WrongWitnessFamily => "wrong-family",
        }
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown fault '{s}' (expected dropped-factorial, wrong-gamma or wrong-family)"))
    }
}

pub(crate) type ConvFn = fn(&ExpPolynomial, &ExpPolynomial) -> Result<ExpPolynomial, ExactError>;
pub(crate) type PartialConvFn = fn(&ExpPolynomial, &ExpPolynomial, &IndexSubset) -> Result<ExpPolynomial, ExactError>;
pub(crate) type WrightFn = fn(f64, f64) -> f64;
pub(crate) type FamilyFn = fn(&Witness) -> SequenceFamily;

/// The implementations the properties call.
#[derive(Clone, Copy)]
pub(crate) struct Kernels {
    pub conv: ConvFn,
    pub conv_partial: PartialConvFn,
    pub wright: WrightFn,
    pub witness_family: FamilyFn,
}

fn true_conv(f: &ExpPolynomial, g: &ExpPolynomial) -> Result<ExpPolynomial, ExactError> {
    f.convolve(g)
}

fn true_conv_partial(
    u: &ExpPolynomial,
    kernel: &ExpPolynomial,
    subset: &IndexSubset,
) -> Result<ExpPolynomial, ExactError> {
    u.convolve_partial(kernel, subset)
}

fn true_wright(gamma: f64, s: f64) -> f64 {
    WrightParams::new(gamma).and_then(|p| wright_eval(&p, s)).unwrap_or(f64::NAN)
}

fn true_family(w: &Witness) -> SequenceFamily {
    w.family.clone()
}

fn invert_without_factorial(r: &RationalTransform) -> Result<ExpPolynomial, ExactError> {
    let terms = r
        .terms()
        .iter()
        .map(|t| ExpMonomial {
            coeff: t.coeff.clone(),
            powers: t.orders.iter().map(|p| p - 1).collect(),
            rates: t.poles.clone(),
        })
        .collect();
    ExpPolynomial::new(r.dim(), terms)
}

fn conv_without_factorial(f: &ExpPolynomial, g: &ExpPolynomial) -> Result<ExpPolynomial, ExactError> {
    invert_without_factorial(&f.laplace().mul(&g.laplace())?)
}

fn partial_conv_without_factorial(
    u: &ExpPolynomial,
    kernel: &ExpPolynomial,
    subset: &IndexSubset,
) -> Result<ExpPolynomial, ExactError> {
    invert_without_factorial(&u.laplace().mul_embedded(&kernel.laplace(), subset)?)
}

fn reciprocal_gamma(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / gamma(x)
    } else {
        (PI * x).sin() * gamma(1.0 - x) / PI
    }
}

fn wright_wrong_argument(g: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    let mut term_scale = 1.0; // s^k / k!
    for k in 0..150 {
        if k > 0 {
            term_scale *= s / k as f64;
        }
        let t = term_scale * reciprocal_gamma(1.0 - g * k as f64);
        acc += if k % 2 == 0 { t } else { -t };
        if k > 10 && term_scale < 1e-18 * acc.abs().max(1e-300) {
            break;
        }
    }
    acc
}

fn shifted_family(w: &Witness) -> SequenceFamily {
    let mut z = vec![Complex64::new(0.0, 0.0); w.family.dim()];
    z[0] = Complex64::new(1.0, 0.0);
    w.family.derive(Derivation::Shift { z }).expect("shift matches the dimension")
}

impl Kernels {
    pub fn with_faults(faults: &[Fault]) -> Self {
        let mut k = Kernels {
            conv: true_conv,
            conv_partial: true_conv_partial,
            wright: true_wright,
            witness_family: true_family,
        };
        for f in faults {
            match f {
                Fault::DroppedFactorial => {
                    k.conv = conv_without_factorial;
                    k.conv_partial = partial_conv_without_factorial;
                }
                Fault::WrongGammaArgument => k.wright = wright_wrong_argument,
                Fault::WrongWitnessFamily => k.witness_family = shifted_family,
            }
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Fault::ALL {
            assert_eq!(f.name().parse::<Fault>().unwrap(), f);
        }
        assert!("x".parse::<Fault>().is_err());
    }

    #[test]
    fn mutants_differ_from_the_real_kernels() {
        let f = crate::exact::g_k(3);
        let good = true_conv(&f, &f).unwrap();
        let bad = conv_without_factorial(&f, &f).unwrap();
        assert_ne!(good, bad);
        assert!((true_wright(0.5, 1.0) - wright_wrong_argument(0.5, 1.0)).abs() > 1e-3);
    }
}
