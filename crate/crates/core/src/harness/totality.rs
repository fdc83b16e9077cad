use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::sequences::{Point, SequenceError, SequenceFamily};

/// The three closure conditions that make the monomials `t^{λ−1}`, `λ ∈ S`,
/// a subalgebra containing constants and separating points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalityConditions {
    /// `(1,…,1) ∈ S`.
    pub all_ones: bool,
    /// For every axis `j`, some point differs from 1 only in coordinate `j`.
    pub single_deviation: bool,
    pub single_deviation_axes: Vec<bool>,
    /// `λ + λ' − (1,…,1) ∈ S` for every checked pair of prefix points.
    /// Evidence only: it holds on the prefix.
    pub additive_closure: bool,
    pub pairs_checked: usize,
    pub pairs_beyond_lookup: usize,
    pub prefix: usize,
    pub lookup: usize,
}

const GRID: f64 = 1e9;
const LOOKUP_CAP: usize = 200_000;

fn key(p: &Point) -> Vec<(i64, i64)> {
    p.iter().map(|z| ((z.re * GRID).round() as i64, (z.im * GRID).round() as i64)).collect()
}

fn is_one(z: num_complex::Complex64) -> bool {
    (z.re - 1.0).abs() <= 1e-12 && z.im.abs() <= 1e-12
}

fn radius(p: &Point) -> f64 {
    p.iter().map(|z| (z.re - 1.0).abs() + z.im.abs()).sum()
}

/// Checks the conditions on the first `prefix` points. Sums of pairs are
/// looked up in a longer enumeration that reaches twice the prefix radius
/// when the family is ordered by growing size; pairs whose sum lies beyond
/// the lookup are counted separately and not judged.
pub fn check_totality_conditions(fam: &SequenceFamily, prefix: usize) -> Result<TotalityConditions, SequenceError> {
    let finite = fam.finite_len();
    let n = finite.map_or(prefix, |l| l.min(prefix));
    let pts = fam.enumerate(n)?;
    if let Some(bad) = pts.iter().flatten().find(|z| z.re < 1.0 - 1e-12) {
        return Err(SequenceError::Precondition(format!("need Re λ ≥ 1 on every axis, found {bad}")));
    }
    let dim = fam.dim();
    let all_ones = pts.iter().any(|p| p.iter().all(|z| is_one(*z)));
    let single_deviation_axes: Vec<bool> = (0..dim)
        .map(|j| pts.iter().any(|p| !is_one(p[j]) && (0..dim).filter(|&s| s != j).all(|s| is_one(p[s]))))
        .collect();

    let max_r = pts.iter().map(radius).fold(0.0, f64::max);
    let lookup_pts = match finite {
        Some(len) => fam.enumerate(len)?,
        None => {
            let mut m = (4 * n).max(16);
            loop {
                let cand = fam.enumerate(m)?;
                let reached = cand.last().map(radius).unwrap_or(0.0);
                if reached > 2.0 * max_r + 1.0 || m >= LOOKUP_CAP {
                    break cand;
                }
                m = (m * 2).min(LOOKUP_CAP);
            }
        }
    };
    let covered = if finite.is_some() { f64::INFINITY } else { lookup_pts.last().map(radius).unwrap_or(0.0) };
    let table: HashSet<Vec<(i64, i64)>> = lookup_pts.iter().map(key).collect();
    let mut checked = 0;
    let mut beyond = 0;
    let mut closure = true;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i..] {
            let sum: Point = p.iter().zip(q).map(|(a, b)| a + b - 1.0).collect();
            if radius(&sum) >= covered {
                beyond += 1;
                continue;
            }
            checked += 1;
            if !table.contains(&key(&sum)) {
                closure = false;
            }
        }
    }
    Ok(TotalityConditions {
        all_ones,
        single_deviation: single_deviation_axes.iter().all(|b| *b),
        single_deviation_axes,
        additive_closure: closure,
        pairs_checked: checked,
        pairs_beyond_lookup: beyond,
        prefix: n,
        lookup: lookup_pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn int_points(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(a, b)| vec![Complex64::new(a as f64, 0.0), Complex64::new(b as f64, 0.0)]).collect()
    }

    #[test]
    fn full_lattice_meets_all_three() {
        let f = SequenceFamily::parse("product:(affine:n=1;a=1;b=1)x(affine:n=1;a=1;b=1)").unwrap();
        let r = check_totality_conditions(&f, 100).unwrap();
        assert!(r.all_ones && r.single_deviation && r.additive_closure);
        assert!(r.pairs_checked > 4000);
        let f3 = SequenceFamily::parse("affine:n=3;a=1;b=1").unwrap();
        let r = check_totality_conditions(&f3, 60).unwrap();
        assert!(r.all_ones && r.single_deviation && r.additive_closure);
    }

    #[test]
    fn missing_origin_breaks_the_first() {
        let pts: Vec<(i64, i64)> =
            (1..=12).flat_map(|a| (1..=12).map(move |b| (a, b))).filter(|&p| p != (1, 1)).collect();
        let f = SequenceFamily::finite("lattice-minus-one", int_points(&pts)).unwrap();
        let r = check_totality_conditions(&f, 500).unwrap();
        assert!(!r.all_ones && r.single_deviation);
    }

    #[test]
    fn three_points_are_not_closed() {
        let f = SequenceFamily::finite("three", int_points(&[(1, 1), (2, 1), (1, 2)])).unwrap();
        let r = check_totality_conditions(&f, 3).unwrap();
        assert_eq!((r.all_ones, r.single_deviation, r.additive_closure), (true, true, false));
    }

    #[test]
    fn diagonal_lacks_single_deviation() {
        let f = SequenceFamily::parse("explicit:diag-kk").unwrap();
        let r = check_totality_conditions(&f, 50).unwrap();
        assert!(r.all_ones && !r.single_deviation && r.additive_closure);
        assert!(
            check_totality_conditions(&SequenceFamily::parse("impow:n=1;gamma=0.5|shift=-0.5").unwrap(), 5).is_err()
        );
    }
}
