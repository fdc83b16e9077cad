//! Text form of sequence families.
//!
//! ```text
//! family      := base ('|' derivation)*
//! base        := 'affine:n=2;a=1,1;b=1,1'
//!              | 'power:n=1;a=1;b=1;gamma=0.5'
//!              | 'impow:n=1;gamma=0.6'
//!              | 'product:(F)x(F)…' | 'product[reverse]:(F)x(F)…'
//!              | 'sector:theta=0.78'
//!              | 'explicit:' ( 'diag-kk' | 'diag:offset=1' | 'doetsch' | 'rays:c=2,3;d=1'
//!                            | 'cone' | 'strip:width=3' | 'list:1,1;2,1+1i' | '@points.csv' )
//! derivation  := 'shift=0+1i,2' | 'project=1,3' | 'split=2:0' | 'subordinate=1,2:0.5,0.5'
//!              | 'reindex=4'
//! ```
//!
//! Lists with one entry are broadcast to `n`. Coordinates in `project` and
//! `subordinate` are 1-based.

use std::collections::HashMap;

use num_complex::Complex64;

use super::family::{join, Derivation, ExplicitSource, FamilyKind, Generator, Pairing, Point, SequenceFamily};
use super::SequenceError;
use crate::exact::IndexSubset;

fn perr(msg: impl Into<String>) -> SequenceError {
    SequenceError::Parse(msg.into())
}

/// Parses `"1"`, `"-2.5"`, `"1+2i"`, `"3e-1-i"`, `"2i"`, `"-i"`.
pub fn parse_complex(s: &str) -> Result<Complex64, SequenceError> {
    let s = s.trim();
    let bad = || perr(format!("bad complex number '{s}'"));
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let unit = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        t => num(t),
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => Ok(Complex64::new(num(&body[..p])?, unit(&body[p..])?)),
        None => Ok(Complex64::new(0.0, unit(body)?)),
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn floats(s: &str) -> Result<Vec<f64>, SequenceError> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| perr(format!("bad number '{t}'")))).collect()
}

fn usizes(s: &str) -> Result<Vec<usize>, SequenceError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|_| perr(format!("bad integer '{t}'"))))
        .collect()
}

fn keyvals(s: &str) -> Result<HashMap<&str, &str>, SequenceError> {
    let mut out = HashMap::new();
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| perr(format!("expected key=value, got '{part}'")))?;
        out.insert(k.trim(), v.trim());
    }
    Ok(out)
}

fn broadcast(v: Vec<f64>, n: usize, name: &str) -> Result<Vec<f64>, SequenceError> {
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        l if l == n => Ok(v),
        l => Err(perr(format!("{name} has {l} entries, expected 1 or {n}"))),
    }
}

fn get<'a>(kv: &HashMap<&str, &'a str>, key: &str) -> Result<&'a str, SequenceError> {
    kv.get(key).copied().ok_or_else(|| perr(format!("missing '{key}'")))
}

/// Splits at separators that sit outside parentheses.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>, SequenceError> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut parts = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(perr("unbalanced parentheses"));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(perr("unbalanced parentheses"));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parse_points_inline(s: &str) -> Result<Vec<Point>, SequenceError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(|p| p.split(',').map(parse_complex).collect()).collect()
}

/// Reads a CSV file with one point per row and one complex coordinate per
/// column. Lines starting with `#` are skipped.
pub fn read_points_csv(path: &str) -> Result<Vec<Point>, SequenceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| perr(format!("cannot read {path}: {e}")))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| perr(format!("{path}: {e}")))?;
        out.push(rec.iter().map(parse_complex).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(out)
}

fn parse_explicit(body: &str) -> Result<SequenceFamily, SequenceError> {
    if let Some(path) = body.strip_prefix('@') {
        return SequenceFamily::finite(body, read_points_csv(path)?);
    }
    if let Some(pts) = body.strip_prefix("list:") {
        return SequenceFamily::finite("list", parse_points_inline(pts)?);
    }
    let (head, rest) = body.split_once(':').unwrap_or((body, ""));
    let kv = keyvals(rest)?;
    let gen = match head {
        "diag-kk" => Generator::Diagonal { offset: 0 },
        "diag" => Generator::Diagonal { offset: get(&kv, "offset")?.parse().map_err(|_| perr("bad diagonal offset"))? },
        "doetsch" => Generator::Doetsch,
        "rays" => Generator::Rays {
            c: usizes(kv.get("c").copied().unwrap_or(""))?.into_iter().map(|x| x as u32).collect(),
            d: usizes(kv.get("d").copied().unwrap_or(""))?.into_iter().map(|x| x as u32).collect(),
        },
        "cone" => Generator::Cone,
        "strip" => Generator::Strip { width: get(&kv, "width")?.parse().map_err(|_| perr("bad strip width"))? },
        other => return Err(perr(format!("unknown explicit family '{other}'"))),
    };
    SequenceFamily::generated(gen)
}

fn parse_base(s: &str) -> Result<SequenceFamily, SequenceError> {
    let s = s.trim();
    let (head, body) = s.split_once(':').ok_or_else(|| perr(format!("expected 'kind:params', got '{s}'")))?;
    match head {
        "affine" | "power" | "impow" => {
            let kv = keyvals(body)?;
            let n: usize = get(&kv, "n")?.parse().map_err(|_| perr("bad n"))?;
            if n == 0 {
                return Err(perr("n must be positive"));
            }
            match head {
                "affine" => SequenceFamily::affine(
                    broadcast(floats(get(&kv, "a")?)?, n, "a")?,
                    broadcast(floats(get(&kv, "b")?)?, n, "b")?,
                ),
                "power" => SequenceFamily::power(
                    broadcast(floats(get(&kv, "a")?)?, n, "a")?,
                    broadcast(floats(get(&kv, "b")?)?, n, "b")?,
                    broadcast(floats(get(&kv, "gamma")?)?, n, "gamma")?,
                ),
                _ => SequenceFamily::imaginary_power(broadcast(floats(get(&kv, "gamma")?)?, n, "gamma")?),
            }
        }
        "product" | "product[reverse]" => {
            let pairing = if head == "product" { Pairing::CantorDiagonal } else { Pairing::ReverseDiagonal };
            let factors = split_top(body, 'x')?
                .into_iter()
                .map(|f| {
                    let f = f.trim();
                    let inner = f
                        .strip_prefix('(')
                        .and_then(|f| f.strip_suffix(')'))
                        .ok_or_else(|| perr(format!("product factors must be parenthesised, got '{f}'")))?;
                    parse_family(inner)
                })
                .collect::<Result<Vec<_>, _>>()?;
            SequenceFamily::product(factors, pairing)
        }
        "sector" => {
            let kv = keyvals(body)?;
            SequenceFamily::sector(get(&kv, "theta")?.parse().map_err(|_| perr("bad theta"))?)
        }
        "explicit" => parse_explicit(body),
        other => Err(perr(format!("unknown family kind '{other}'"))),
    }
}

fn parse_derivation(s: &str, dim: usize) -> Result<Derivation, SequenceError> {
    let (k, v) = s.split_once('=').ok_or_else(|| perr(format!("expected derivation=value, got '{s}'")))?;
    let subset = |coords: &str| -> Result<IndexSubset, SequenceError> {
        IndexSubset::from_one_based(&usizes(coords)?, dim).map_err(|e| perr(e.to_string()))
    };
    Ok(match k.trim() {
        "shift" => {
            let z = v.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
            let z = if z.len() == 1 { vec![z[0]; dim] } else { z };
            Derivation::Shift { z }
        }
        "project" => Derivation::Project { subset: subset(v)? },
        "split" => {
            let (m, r) = v.split_once(':').ok_or_else(|| perr("split expects m:r"))?;
            Derivation::ResidueSplit {
                m: m.trim().parse().map_err(|_| perr("bad modulus"))?,
                r: r.trim().parse().map_err(|_| perr("bad residue"))?,
            }
        }
        "subordinate" => {
            let (c, g) = v.split_once(':').ok_or_else(|| perr("subordinate expects coords:orders"))?;
            let coords = usizes(c)?;
            let orders = broadcast(floats(g)?, coords.len(), "orders")?;
            let mut pairs: Vec<(usize, f64)> = coords.into_iter().zip(orders).collect();
            pairs.sort_by_key(|p| p.0);
            let subset = subset(&join(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()))?;
            Derivation::Subordinate { subset, gammas: pairs.into_iter().map(|p| p.1).collect() }
        }
        "reindex" => Derivation::Reindex { block: v.trim().parse().map_err(|_| perr("bad block length"))? },
        other => return Err(perr(format!("unknown derivation '{other}'"))),
    })
}

/// Parses the text form of a family.
pub fn parse_family(s: &str) -> Result<SequenceFamily, SequenceError> {
    let parts = split_top(s, '|')?;
    let mut fam = parse_base(parts[0])?;
    for d in &parts[1..] {
        let derivation = parse_derivation(d.trim(), fam.dim())?;
        fam = fam.derive(derivation)?;
    }
    Ok(fam)
}

fn one_based(s: &IndexSubset) -> String {
    join(&s.coords().iter().map(|c| c + 1).collect::<Vec<_>>())
}

impl SequenceFamily {
    pub fn parse(s: &str) -> Result<Self, SequenceError> {
        parse_family(s)
    }

    /// Canonical text form; `parse(to_spec())` reproduces the family.
    pub fn to_spec(&self) -> String {
        match self.kind() {
            FamilyKind::AffineLattice { a, b } => format!("affine:n={};a={};b={}", self.dim(), join(a), join(b)),
            FamilyKind::PowerLattice { a, b, gamma } => {
                format!("power:n={};a={};b={};gamma={}", self.dim(), join(a), join(b), join(gamma))
            }
            FamilyKind::ImaginaryPower { gamma } => format!("impow:n={};gamma={}", self.dim(), join(gamma)),
            FamilyKind::ProductLattice { factors, pairing } => {
                let head = match pairing {
                    Pairing::CantorDiagonal => "product",
                    Pairing::ReverseDiagonal => "product[reverse]",
                };
                let inner: Vec<String> = factors.iter().map(|f| format!("({})", f.to_spec())).collect();
                format!("{head}:{}", inner.join("x"))
            }
            FamilyKind::SectorLattice { theta } => format!("sector:theta={theta}"),
            FamilyKind::Explicit { name, source } => match source {
                ExplicitSource::Finite(pts) if !name.starts_with('@') => {
                    let rows: Vec<String> = pts
                        .iter()
                        .map(|p| p.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(","))
                        .collect();
                    format!("explicit:list:{}", rows.join(";"))
                }
                _ => format!("explicit:{name}"),
            },
            FamilyKind::Derived { base, derivation } => {
                let d = match derivation {
                    Derivation::Shift { z } => {
                        format!("shift={}", z.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(","))
                    }
                    Derivation::Project { subset } => format!("project={}", one_based(subset)),
                    Derivation::ResidueSplit { m, r } => format!("split={m}:{r}"),
                    Derivation::Subordinate { subset, gammas } => {
                        format!("subordinate={}:{}", one_based(subset), join(gammas))
                    }
                    Derivation::Reindex { block } => format!("reindex={block}"),
                };
                format!("{}|{d}", base.to_spec())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |s: &str| parse_complex(s).unwrap();
        assert_eq!(c("1"), Complex64::new(1.0, 0.0));
        assert_eq!(c("-2.5"), Complex64::new(-2.5, 0.0));
        assert_eq!(c("1+2i"), Complex64::new(1.0, 2.0));
        assert_eq!(c("1-i"), Complex64::new(1.0, -1.0));
        assert_eq!(c("-i"), Complex64::new(0.0, -1.0));
        assert_eq!(c("i"), Complex64::new(0.0, 1.0));
        assert_eq!(c("2i"), Complex64::new(0.0, 2.0));
        assert_eq!(c("1e-3+2e+1i"), Complex64::new(1e-3, 20.0));
        assert_eq!(c("-1e-3i"), Complex64::new(0.0, -1e-3));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
        for z in [Complex64::new(1.5, -2.0), Complex64::new(0.0, 1.0), Complex64::new(-3.0, 0.0)] {
            assert_eq!(c(&format_complex(z)), z);
        }
    }

    #[test]
    fn round_trips() {
        for s in [
            "affine:n=2;a=1,1;b=1,2",
            "power:n=1;a=1;b=1;gamma=0.5",
            "impow:n=2;gamma=0.4,0.6",
            "product:(affine:n=1;a=1;b=1)x(impow:n=1;gamma=0.3)",
            "product[reverse]:(affine:n=1;a=1;b=1)x(affine:n=1;a=2;b=1|shift=0+1i)",
            "sector:theta=0.7853981633974483",
            "explicit:diag-kk",
            "explicit:diag:offset=1",
            "explicit:doetsch",
            "explicit:rays:c=2,3;d=1",
            "explicit:cone",
            "explicit:strip:width=3",
            "explicit:list:1,1;2,1+1i",
            "affine:n=3;a=1,1,1;b=1,1,1|project=1,3|shift=0+1i,-1|split=2:1|subordinate=2:0.5|reindex=3",
        ] {
            let f = parse_family(s).unwrap();
            assert_eq!(f.to_spec(), s);
            assert_eq!(parse_family(&f.to_spec()).unwrap(), f);
        }
    }

    #[test]
    fn broadcasts_and_errors() {
        let f = parse_family("affine:n=3;a=1;b=2").unwrap();
        assert_eq!(f.to_spec(), "affine:n=3;a=1,1,1;b=2,2,2");
        assert!(parse_family("affine:n=2;a=1,1,1;b=1").is_err());
        assert!(parse_family("nope:x=1").is_err());
        assert!(parse_family("affine:n=1;a=1;b=1|project=2").is_err());
        assert!(parse_family("product:(affine:n=1;a=1;b=1").is_err());
        assert!(parse_family("explicit:@/nonexistent/file.csv").is_err());
    }

    #[test]
    fn reads_csv_points() {
        let dir = std::env::temp_dir().join(format!("uniqseq-spec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pts.csv");
        std::fs::write(&path, "# two points\n1, 2+1i\n3,4\n").unwrap();
        let spec = format!("explicit:@{}", path.display());
        let f = parse_family(&spec).unwrap();
        assert_eq!(f.to_spec(), spec);
        let pts = f.enumerate(2).unwrap();
        assert_eq!(pts[0][1], Complex64::new(2.0, 1.0));
        std::fs::remove_dir_all(&dir).ok();
    }
}
