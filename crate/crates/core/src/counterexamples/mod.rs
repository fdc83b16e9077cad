//! Explicit functions whose transforms vanish on whole sequences, and a
//! verifier for those zeros.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{g_k, ExactError, ExpPolynomial, GaussianRational, RationalTransform};
use crate::numeric::{laplace_numeric, FunctionDescriptor, GrowthHint, NumericError};
use crate::sequences::{format_complex, Generator, SequenceError, SequenceFamily};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CounterexampleError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("unknown witness '{0}'")]
    UnknownWitness(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type ClosedForm = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum WitnessFunction {
    Exact(ExpPolynomial),
    Numeric(FunctionDescriptor),
}

#[derive(Clone)]
pub enum WitnessTransform {
    Rational(RationalTransform),
    ClosedForm(ClosedForm),
}

impl fmt::Debug for WitnessTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessTransform::Rational(r) => write!(f, "Rational({} terms)", r.terms().len()),
            WitnessTransform::ClosedForm(_) => f.write_str("ClosedForm"),
        }
    }
}

impl fmt::Debug for WitnessFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessFunction::Exact(p) => write!(f, "Exact({} terms)", p.terms().len()),
            WitnessFunction::Numeric(d) => write!(f, "Numeric({d:?})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub id: String,
    pub function: WitnessFunction,
    pub transform: Option<WitnessTransform>,
    pub family: SequenceFamily,
    pub provenance: String,
    /// A point where the transform is known to be nonzero.
    pub probe_point: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub family: String,
    pub provenance: String,
    pub function: String,
    pub transform: String,
    pub probe_point: Vec<String>,
}

impl Witness {
    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// The function as a descriptor for numerical work.
    pub fn descriptor(&self) -> FunctionDescriptor {
        match &self.function {
            WitnessFunction::Exact(p) => FunctionDescriptor::from_exppoly(p, 0.25),
            WitnessFunction::Numeric(d) => d.clone(),
        }
    }

    /// Transform value, from the exact or closed form when present, else by
    /// numerical integration at tolerance `tol`.
    pub fn transform_at(&self, lambda: &[Complex64], tol: f64) -> Result<Complex64, CounterexampleError> {
        match &self.transform {
            Some(WitnessTransform::Rational(r)) => Ok(r.eval(lambda)?),
            Some(WitnessTransform::ClosedForm(f)) => Ok(f(lambda)),
            None => Ok(laplace_numeric(&self.descriptor(), lambda, tol)?.value),
        }
    }

    /// Exact transform value at a point with dyadic-rational coordinates.
    pub fn transform_exact(&self, lambda: &[Complex64]) -> Option<Result<GaussianRational, CounterexampleError>> {
        let Some(WitnessTransform::Rational(r)) = &self.transform else {
            return None;
        };
        Some((|| {
            let pts = lambda.iter().map(|z| GaussianRational::from_complex64(*z)).collect::<Result<Vec<_>, _>>()?;
            Ok(r.eval_exact(&pts)?)
        })())
    }

    pub fn manifest(&self) -> ManifestEntry {
        ManifestEntry {
            id: self.id.clone(),
            family: self.family.to_spec(),
            provenance: self.provenance.clone(),
            function: match &self.function {
                WitnessFunction::Exact(_) => "exp-polynomial".into(),
                WitnessFunction::Numeric(_) => "numeric".into(),
            },
            transform: match &self.transform {
                Some(WitnessTransform::Rational(_)) => "rational".into(),
                Some(WitnessTransform::ClosedForm(_)) => "closed-form".into(),
                None => "numeric".into(),
            },
            probe_point: self.probe_point.iter().map(|z| format_complex(*z)).collect(),
        }
    }

    /// Exact function in the text serialization format, when available.
    pub fn function_text(&self) -> Option<String> {
        match &self.function {
            WitnessFunction::Exact(p) => Some(p.to_text()),
            WitnessFunction::Numeric(_) => None,
        }
    }
}

/// `(e^{2πu} − 1)/u` with `u = i − λ`, continued by `2π` at `u = 0`.
fn dech_transform(lambda: Complex64) -> Complex64 {
    let u = Complex64::new(0.0, 1.0) - lambda;
    let x = u * (2.0 * PI);
    if x.norm() < 1e-3 {
        // expm1(x)/x = 1 + x/2 + x²/6 + x³/24 + x⁴/120
        let series = Complex64::new(1.0, 0.0) + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
        return series * (2.0 * PI);
    }
    (x.exp() - 1.0) / u
}

/// `e^{it}` on `[0, 2π]`, zero afterwards; its transform vanishes at every
/// `ki` with `k ∈ ℤ \ {0, 1}`.
pub fn dech_witness() -> Witness {
    let f = FunctionDescriptor::new(1, GrowthHint { m: 1.0, omega: vec![0.0] }, |t: &[f64]| {
        if t[0] <= 2.0 * PI {
            Complex64::new(0.0, t[0]).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .and_then(|d| d.with_support(vec![2.0 * PI]))
    .expect("valid descriptor");
    Witness {
        id: "dech".into(),
        function: WitnessFunction::Numeric(f),
        transform: Some(WitnessTransform::ClosedForm(Arc::new(|l: &[Complex64]| dech_transform(l[0])))),
        family: SequenceFamily::generated(Generator::Doetsch).expect("valid generator"),
        provenance: "Doetsch counterexample".into(),
        probe_point: vec![Complex64::new(1.0, 0.0)],
    }
}

/// `g₂⊗g₃ − g₃⊗g₂` with transform `(λ₁−λ₂)/(λ₁³λ₂³)`, zero on the diagonal.
pub fn diagonal_witness() -> Witness {
    let f = &g_k(2).tensor(&g_k(3)) - &g_k(3).tensor(&g_k(2));
    let transform = f.laplace();
    Witness {
        id: "diagonal".into(),
        function: WitnessFunction::Exact(f),
        transform: Some(WitnessTransform::Rational(transform)),
        family: SequenceFamily::generated(Generator::Diagonal { offset: 0 }).expect("valid generator"),
        provenance: "Example oro".into(),
        probe_point: vec![Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)],
    }
}

/// `(aλ₁ − bλ₂)/(λ₁³λ₂³)`, zero on the ray `bλ₂ = aλ₁`.
fn ray_factor(a: i64, b: i64) -> Result<RationalTransform, ExactError> {
    RationalTransform::from_polynomial_over_powers(
        &[(GaussianRational::from_integer(a), vec![1, 0]), (GaussianRational::from_integer(-b), vec![0, 1])],
        &[3, 3],
    )
}

/// `(λ₁−1)/(λ₁³λ₂³)`-type single-coordinate factor: `(λ_j − 1)/(λ₁³λ₂³)`.
fn unit_factor(axis: usize) -> Result<RationalTransform, ExactError> {
    let mut exps = vec![0, 0];
    exps[axis] = 1;
    RationalTransform::from_polynomial_over_powers(
        &[(GaussianRational::one(), exps), (GaussianRational::from_integer(-1), vec![0, 0])],
        &[3, 3],
    )
}

/// The transforms of the individual factors, in product order.
pub fn ray_factors(c: &[u32], d: &[u32]) -> Result<Vec<RationalTransform>, CounterexampleError> {
    if c.iter().chain(d).any(|&x| x == 0) {
        return Err(CounterexampleError::InvalidParameter("ray slopes must be positive integers".into()));
    }
    let mut out = vec![unit_factor(0)?, unit_factor(1)?];
    for &cj in c {
        out.push(ray_factor(1, cj as i64)?);
    }
    for &dj in d {
        out.push(ray_factor(dj as i64, 1)?);
    }
    Ok(out)
}

/// Product of the ray factors, inverted exactly; its transform vanishes on
/// `{(k,1)} ∪ {(1,k)} ∪ {(c_j k, k)} ∪ {(k, d_j k)}`.
pub fn ray_witness(c: &[u32], d: &[u32]) -> Result<Witness, CounterexampleError> {
    let factors = ray_factors(c, d)?;
    let mut transform = factors[0].clone();
    for f in &factors[1..] {
        transform = transform.mul(f)?;
    }
    let family = SequenceFamily::generated(Generator::Rays { c: c.to_vec(), d: d.to_vec() })?;
    Ok(Witness {
        id: family.known_witness().expect("ray families carry a witness id"),
        function: WitnessFunction::Exact(transform.inverse()),
        transform: Some(WitnessTransform::Rational(transform)),
        family,
        provenance: "Example oro".into(),
        probe_point: vec![Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)],
    })
}

/// Looks up `dech`, `diagonal` or `ray:c=…;d=…`.
pub fn witness_by_id(id: &str) -> Result<Witness, CounterexampleError> {
    match id {
        "dech" => Ok(dech_witness()),
        "diagonal" => Ok(diagonal_witness()),
        _ => {
            let body = id.strip_prefix("ray:").ok_or_else(|| CounterexampleError::UnknownWitness(id.into()))?;
            let mut c = Vec::new();
            let mut d = Vec::new();
            for part in body.split(';').filter(|p| !p.is_empty()) {
                let (k, v) = part.split_once('=').ok_or_else(|| CounterexampleError::UnknownWitness(id.into()))?;
                let vals = v
                    .split(',')
                    .filter(|x| !x.is_empty())
                    .map(|x| x.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CounterexampleError::UnknownWitness(id.into()))?;
                match k.trim() {
                    "c" => c = vals,
                    "d" => d = vals,
                    _ => return Err(CounterexampleError::UnknownWitness(id.into())),
                }
            }
            ray_witness(&c, &d)
        }
    }
}

/// The three built-in witnesses, with the ray witness for `c = [2], d = [3]`.
pub fn builtin_witnesses() -> Vec<Witness> {
    vec![dech_witness(), diagonal_witness(), ray_witness(&[2], &[3]).expect("valid slopes")]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    pub witness: String,
    pub family: String,
    pub n: usize,
    pub exact: bool,
    pub tol: f64,
    pub max_abs: f64,
    pub argmax: usize,
    pub points: Vec<Vec<Complex64>>,
    pub values: Vec<Complex64>,
    pub pass: bool,
}

/// Evaluates the transform on the first `n` points of the witness family.
pub fn verify_annihilation(w: &Witness, n: usize, tol: f64) -> Result<AnnihilationReport, CounterexampleError> {
    verify_annihilation_on(w, &w.family, n, tol)
}

/// As [`verify_annihilation`] on another family; used for negative controls.
///
/// On the exact path values are rational and the check is `max = 0`; `tol`
/// is then ignored.
pub fn verify_annihilation_on(
    w: &Witness,
    family: &SequenceFamily,
    n: usize,
    tol: f64,
) -> Result<AnnihilationReport, CounterexampleError> {
    if n == 0 {
        return Err(CounterexampleError::InvalidParameter("need at least one point".into()));
    }
    if family.dim() != w.dim() {
        return Err(CounterexampleError::InvalidParameter(format!(
            "family dimension {} does not match witness dimension {}",
            family.dim(),
            w.dim()
        )));
    }
    let points = family.enumerate(n)?;
    let exact = matches!(w.transform, Some(WitnessTransform::Rational(_)));
    let values: Vec<Complex64> = points
        .par_iter()
        .map(|p| match w.transform_exact(p) {
            Some(v) => v.map(|g| g.to_complex64()),
            None => w.transform_at(p, tol.max(1e-12) * 0.1),
        })
        .collect::<Result<_, _>>()?;
    let (argmax, max_abs) =
        values
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, 0.0), |best, (i, m)| if m > best.1 { (i, m) } else { best });
    let pass = if exact { max_abs == 0.0 } else { max_abs <= tol };
    Ok(AnnihilationReport {
        witness: w.id.clone(),
        family: family.to_spec(),
        n,
        exact,
        tol: if exact { 0.0 } else { tol },
        max_abs,
        argmax,
        points,
        values,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExpMonomial;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dech_closed_form() {
        let w = dech_witness();
        assert!(w.transform_at(&[c(0.0, 2.0)], 0.0).unwrap().norm() < 1e-14);
        assert!((w.transform_at(&[c(0.0, 1.0)], 0.0).unwrap() - 2.0 * PI).norm() < 1e-14);
        // continuity across the removable point
        let near = w.transform_at(&[c(1e-5, 1.0)], 0.0).unwrap();
        let direct = {
            let u = c(0.0, 1.0) - c(1e-5, 1.0);
            ((u * 2.0 * PI).exp() - 1.0) / u
        };
        assert!((near - direct).norm() < 1e-9);
        let at_one = w.transform_at(&[c(1.0, 0.0)], 0.0).unwrap();
        let expect = ((c(-1.0, 1.0) * 2.0 * PI).exp() - 1.0) / c(-1.0, 1.0);
        assert!((at_one - expect).norm() < 1e-15);
        let numeric = laplace_numeric(&w.descriptor(), &[c(1.0, 0.0)], 1e-10).unwrap();
        assert!((numeric.value - expect).norm() < 1e-8);
    }

    #[test]
    fn diagonal_examples() {
        let w = diagonal_witness();
        let WitnessFunction::Exact(f) = &w.function else { panic!() };
        assert!((f.eval(&[1.0, 2.0]).unwrap().re - 1.0).abs() < 1e-15);
        let v = w.transform_exact(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap().unwrap();
        assert_eq!(v, GaussianRational::ratio(-1, 216));
        let r = verify_annihilation(&w, 50, 0.0).unwrap();
        assert!(r.pass && r.exact && r.max_abs == 0.0);
        let shifted = SequenceFamily::generated(Generator::Diagonal { offset: 1 }).unwrap();
        let neg = verify_annihilation_on(&w, &shifted, 50, 1e-10).unwrap();
        assert!(!neg.pass);
        assert_eq!(neg.argmax, 0);
        assert!((neg.max_abs - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn ray_base_block() {
        // (λ₁ − cλ₂)/(λ₁³λ₂³) inverts to t₁t₂²/2 − c t₁²t₂/2
        let cst = 5;
        let inv = ray_factor(1, cst).unwrap().inverse();
        let half = GaussianRational::ratio(1, 2);
        let expect = ExpPolynomial::new(
            2,
            vec![
                ExpMonomial {
                    coeff: half.clone(),
                    powers: vec![1, 2],
                    rates: vec![GaussianRational::zero(), GaussianRational::zero()],
                },
                ExpMonomial {
                    coeff: GaussianRational::ratio(-cst, 2),
                    powers: vec![2, 1],
                    rates: vec![GaussianRational::zero(), GaussianRational::zero()],
                },
            ],
        )
        .unwrap();
        assert_eq!(inv, expect);
    }

    #[test]
    fn ray_witness_vanishes_on_rays() {
        let w = ray_witness(&[2], &[]).unwrap();
        for k in 1..=20 {
            let v = w.transform_exact(&[c(2.0 * k as f64, 0.0), c(k as f64, 0.0)]).unwrap().unwrap();
            assert!(v.is_zero());
        }
        for (cs, ds) in [(vec![], vec![]), (vec![2, 3], vec![1]), (vec![], vec![4])] {
            let w = ray_witness(&cs, &ds).unwrap();
            assert!(verify_annihilation(&w, 50, 0.0).unwrap().pass);
            let probe = w.transform_exact(&w.probe_point).unwrap().unwrap();
            assert!(!probe.is_zero());
            // the inverse transforms back to the same rational function
            let WitnessFunction::Exact(f) = &w.function else { panic!() };
            let Some(WitnessTransform::Rational(r)) = &w.transform else { panic!() };
            assert_eq!(&f.laplace(), r);
        }
        assert!(ray_witness(&[0], &[]).is_err());
    }

    #[test]
    fn lookup_and_manifest() {
        for w in builtin_witnesses() {
            let again = witness_by_id(&w.id).unwrap();
            assert_eq!(again.id, w.id);
            let m = w.manifest();
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(serde_json::from_str::<ManifestEntry>(&json).unwrap(), m);
            assert!(w.transform_at(&w.probe_point, 1e-10).unwrap().norm() > 1e-6);
        }
        assert!(witness_by_id("nope").is_err());
        assert!(witness_by_id("ray:c=x").is_err());
        let text = diagonal_witness().function_text().unwrap();
        assert_eq!(ExpPolynomial::from_text(&text).unwrap(), {
            let WitnessFunction::Exact(f) = diagonal_witness().function else { panic!() };
            f
        });
    }

    #[test]
    fn dech_passes_numerically() {
        let r = verify_annihilation(&dech_witness(), 20, 1e-10).unwrap();
        assert!(r.pass && !r.exact, "{}", r.max_abs);
    }
}
