//! Line-oriented text form.
//!
//! ```text
//! exppoly 2
//! 1/1;0/1;1,2;0/1,-1/1;0/1,0/1
//! ```
//!
//! The header names the kind and dimension. Each following line is one term:
//! `coeff_re;coeff_im;powers;rate_re list;rate_im list` (for transforms the
//! powers field holds pole orders and the rates are the poles). Every exact
//! rational is written as `p/q` in lowest terms, so the text of a normalized
//! value is unique and parsing then printing reproduces it byte for byte.

use std::fmt::Write as _;

use super::{ExactError, ExpMonomial, ExpPolynomial, GaussianRational, PoleTerm, RationalTransform};

const EXPPOLY_TAG: &str = "exppoly";
const RATIONAL_TAG: &str = "rational";

struct RawTerm {
    coeff: GaussianRational,
    ints: Vec<u32>,
    points: Vec<GaussianRational>,
}

fn write_term(out: &mut String, coeff: &GaussianRational, ints: &[u32], points: &[GaussianRational]) {
    let join_r = |f: &dyn Fn(&GaussianRational) -> String| points.iter().map(f).collect::<Vec<_>>().join(",");
    let _ = writeln!(
        out,
        "{};{};{};{};{}",
        GaussianRational::component_string(&coeff.re),
        GaussianRational::component_string(&coeff.im),
        ints.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
        join_r(&|g| GaussianRational::component_string(&g.re)),
        join_r(&|g| GaussianRational::component_string(&g.im)),
    );
}

fn parse_body(text: &str, tag: &str) -> Result<(usize, Vec<RawTerm>), ExactError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| ExactError::Parse("empty input".into()))?;
    let dim = match header.split_once(' ') {
        Some((t, d)) if t == tag => {
            d.trim().parse::<usize>().map_err(|_| ExactError::Parse(format!("bad dimension in header {header:?}")))?
        }
        _ => return Err(ExactError::Parse(format!("expected header \"{tag} <dim>\", got {header:?}"))),
    };
    let mut terms = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() != 5 {
            return Err(ExactError::Parse(format!(
                "term {}: expected 5 ';'-separated fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let coeff = GaussianRational::new(
            GaussianRational::parse_component(fields[0])?,
            GaussianRational::parse_component(fields[1])?,
        );
        let ints = fields[2]
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| ExactError::Parse(format!("bad integer {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let re = fields[3].split(',').map(GaussianRational::parse_component).collect::<Result<Vec<_>, _>>()?;
        let im = fields[4].split(',').map(GaussianRational::parse_component).collect::<Result<Vec<_>, _>>()?;
        if ints.len() != dim || re.len() != dim || im.len() != dim {
            return Err(ExactError::DimensionMismatch { expected: dim, found: ints.len() });
        }
        let points = re.into_iter().zip(im).map(|(r, i)| GaussianRational::new(r, i)).collect();
        terms.push(RawTerm { coeff, ints, points });
    }
    Ok((dim, terms))
}

impl ExpPolynomial {
    pub fn to_text(&self) -> String {
        let mut out = format!("{EXPPOLY_TAG} {}\n", self.dim());
        for m in self.terms() {
            write_term(&mut out, &m.coeff, &m.powers, &m.rates);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ExactError> {
        let (dim, raw) = parse_body(text, EXPPOLY_TAG)?;
        let terms = raw.into_iter().map(|r| ExpMonomial { coeff: r.coeff, powers: r.ints, rates: r.points }).collect();
        Self::new(dim, terms)
    }
}

impl RationalTransform {
    pub fn to_text(&self) -> String {
        let mut out = format!("{RATIONAL_TAG} {}\n", self.dim());
        for t in self.terms() {
            write_term(&mut out, &t.coeff, &t.orders, &t.poles);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ExactError> {
        let (dim, raw) = parse_body(text, RATIONAL_TAG)?;
        let terms = raw.into_iter().map(|r| PoleTerm { coeff: r.coeff, orders: r.ints, poles: r.points }).collect();
        Self::new(dim, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::g_k;

    #[test]
    fn known_text_form() {
        let f = &g_k(2).tensor(&g_k(3)) - &g_k(3).tensor(&g_k(2));
        let text = f.to_text();
        assert_eq!(text, "exppoly 2\n1/2;0/1;1,2;0/1,0/1;0/1,0/1\n-1/2;0/1;2,1;0/1,0/1;0/1,0/1\n");
        assert_eq!(ExpPolynomial::from_text(&text).unwrap(), f);
        let r = f.laplace().to_text();
        assert_eq!(r, "rational 2\n1/1;0/1;2,3;0/1,0/1;0/1,0/1\n-1/1;0/1;3,2;0/1,0/1;0/1,0/1\n");
    }

    #[test]
    fn zero_polynomial_keeps_dimension() {
        let z = ExpPolynomial::zero(3);
        assert_eq!(ExpPolynomial::from_text(&z.to_text()).unwrap(), z);
    }

    #[test]
    fn malformed_inputs() {
        assert!(ExpPolynomial::from_text("").is_err());
        assert!(ExpPolynomial::from_text("rational 1\n").is_err());
        assert!(ExpPolynomial::from_text("exppoly 1\n1/1;0/1;1;0/1\n").is_err());
        assert!(ExpPolynomial::from_text("exppoly 2\n1/1;0/1;1;0/1;0/1\n").is_err());
        assert!(RationalTransform::from_text("rational 1\n1/1;0/1;0;0/1;0/1\n").is_err());
    }
}
