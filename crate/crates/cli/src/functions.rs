//! Function, transform and point-list specifications.
//!
//! Functions: `exp:r1,r2` (e^{r·t}), `power:p1,p2` (t^p), `g:k` (t^{k−1}/(k−1)!),
//! `exppoly:@file` (text serialization), `witness:ID`.
//! Transforms: `pole:c@μ1,μ2^p1,p2;…` (Σ c/∏(λ_j−μ_j)^{p_j}),
//! `rational:@file`, or `laplace:FUNCTION` for an exact function.
//! Point lists: `@file.csv` or inline `x1,x2;y1,y2`.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use uniqseq::counterexamples::{witness_by_id, Witness};
use uniqseq::exact::{g_k, ExpPolynomial, GaussianRational, PoleTerm, RationalTransform};
use uniqseq::numeric::FunctionDescriptor;
use uniqseq::sequences::{parse_complex, read_points_csv};

pub enum FunctionSpec {
    Exact(ExpPolynomial),
    Witness(Box<Witness>),
}

impl FunctionSpec {
    pub fn dim(&self) -> usize {
        match self {
            FunctionSpec::Exact(p) => p.dim(),
            FunctionSpec::Witness(w) => w.dim(),
        }
    }

    pub fn descriptor(&self) -> FunctionDescriptor {
        match self {
            FunctionSpec::Exact(p) => FunctionDescriptor::from_exppoly(p, 0.25),
            FunctionSpec::Witness(w) => w.descriptor(),
        }
    }
}

fn read_file(spec: &str) -> Result<String> {
    let path = spec.strip_prefix('@').ok_or_else(|| anyhow!("expected @path, got '{spec}'"))?;
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

pub fn parse_gaussian(s: &str) -> Result<GaussianRational> {
    let s = s.trim();
    if s.contains('i') {
        let z = parse_complex(s)?;
        return Ok(GaussianRational::from_complex64(z)?);
    }
    let re = GaussianRational::parse_component(s)?;
    Ok(GaussianRational::one().scale(&re))
}

fn list<T>(body: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = body.split(',').map(|x| f(x.trim())).collect::<Result<_>>()?;
    if items.is_empty() {
        bail!("empty list");
    }
    Ok(items)
}

pub fn parse_function(spec: &str) -> Result<FunctionSpec> {
    let (kind, body) = spec.split_once(':').ok_or_else(|| anyhow!("function spec '{spec}' needs a kind prefix"))?;
    let f = match kind {
        "exp" => ExpPolynomial::exponential(list(body, parse_gaussian)?),
        "power" => ExpPolynomial::power(list(body, |x| x.parse::<u32>().map_err(|e| anyhow!("power '{x}': {e}")))?),
        "g" => match body.trim().parse::<u32>() {
            Ok(k) if k >= 1 => g_k(k),
            _ => bail!("g:k needs an integer k >= 1, got '{body}'"),
        },
        "exppoly" => ExpPolynomial::from_text(&read_file(body)?)?,
        "witness" => return Ok(FunctionSpec::Witness(Box::new(witness_by_id(body)?))),
        _ => bail!("unknown function kind '{kind}' (expected exp, power, g, exppoly or witness)"),
    };
    Ok(FunctionSpec::Exact(f))
}

pub fn parse_transform(spec: &str) -> Result<RationalTransform> {
    let (kind, body) = spec.split_once(':').ok_or_else(|| anyhow!("transform spec '{spec}' needs a kind prefix"))?;
    match kind {
        "rational" => Ok(RationalTransform::from_text(&read_file(body)?)?),
        "laplace" => match parse_function(body)? {
            FunctionSpec::Exact(f) => Ok(f.laplace()),
            FunctionSpec::Witness(w) => match &w.function {
                uniqseq::counterexamples::WitnessFunction::Exact(f) => Ok(f.laplace()),
                _ => bail!("witness '{}' has no exact transform", w.id),
            },
        },
        "pole" => {
            let mut terms = Vec::new();
            let mut dim = None;
            for term in body.split(';').filter(|t| !t.trim().is_empty()) {
                let (c, rest) = term.split_once('@').ok_or_else(|| anyhow!("pole term '{term}' needs c@μ"))?;
                let (mus, orders) = match rest.split_once('^') {
                    Some((m, o)) => (m, Some(o)),
                    None => (rest, None),
                };
                let poles = list(mus, parse_gaussian)?;
                let orders = match orders {
                    Some(o) => list(o, |x| x.parse::<u32>().map_err(|e| anyhow!("order '{x}': {e}")))?,
                    None => vec![1; poles.len()],
                };
                if *dim.get_or_insert(poles.len()) != poles.len() {
                    bail!("pole terms disagree on dimension");
                }
                terms.push(PoleTerm { coeff: parse_gaussian(c)?, poles, orders });
            }
            let dim = dim.ok_or_else(|| anyhow!("pole spec has no terms"))?;
            Ok(RationalTransform::new(dim, terms)?)
        }
        _ => bail!("unknown transform kind '{kind}' (expected pole, rational or laplace)"),
    }
}

pub fn parse_points(spec: &str) -> Result<Vec<Vec<Complex64>>> {
    if let Some(path) = spec.strip_prefix('@') {
        return Ok(read_points_csv(path)?);
    }
    let pts: Vec<Vec<Complex64>> = spec
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.split(',').map(|x| parse_complex(x.trim()).map_err(anyhow::Error::from)).collect())
        .collect::<Result<_>>()?;
    if pts.is_empty() {
        bail!("no points given");
    }
    Ok(pts)
}

pub fn parse_real_points(spec: &str) -> Result<Vec<Vec<f64>>> {
    parse_points(spec)?
        .into_iter()
        .map(|p| {
            p.into_iter()
                .map(|z| if z.im == 0.0 { Ok(z.re) } else { Err(anyhow!("expected a real coordinate, got {z}")) })
                .collect()
        })
        .collect()
}

pub fn check_dims<T>(points: &[Vec<T>], dim: usize) -> Result<()> {
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        bail!("point has {} coordinates, expected {dim}", p.len());
    }
    Ok(())
}
