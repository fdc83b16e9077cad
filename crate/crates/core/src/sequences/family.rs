use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SequenceError;
use crate::exact::IndexSubset;

/// A point of `ℂ^n`.
pub type Point = Vec<Complex64>;

/// Bijection `ℕ^n → ℕ` used to order lattice tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// Tuples by increasing index sum, lexicographic within a sum.
    CantorDiagonal,
    /// Tuples by increasing index sum, reverse lexicographic within a sum.
    ReverseDiagonal,
}

/// Built-in infinite point lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    /// `(k, k + offset)` for `k ≥ 1` with both coordinates `≥ 1`.
    Diagonal { offset: i64 },
    /// `ki` for `k ∈ ℤ \ {0, 1}` in the order `−i, 2i, −2i, 3i, −3i, …`.
    Doetsch,
    /// `{(k,1)} ∪ {(1,k)} ∪ ⋃{(c_j k, k)} ∪ ⋃{(k, d_j k)}`, visited ray by ray
    /// for increasing `k` with repeats dropped.
    Rays { c: Vec<u32>, d: Vec<u32> },
    /// `(k₁, k₂)` with `k₁ ≥ k₂ ≥ 1`, by increasing `k₁+k₂` then `k₁`.
    Cone,
    /// `(k₁, k₂)` with `k₁ ≥ 1`, `1 ≤ k₂ ≤ width`, by increasing `k₁+k₂` then `k₁`.
    Strip { width: u32 },
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Doetsch => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExplicitSource {
    Finite(Vec<Point>),
    Generator(Generator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Derivation {
    /// Adds `z` to every point.
    Shift { z: Vec<Complex64> },
    /// Keeps the coordinates in the subset. Distinct points may coincide
    /// after projection.
    Project { subset: IndexSubset },
    /// Keeps the points whose 1-based index is `≡ r (mod m)`.
    ResidueSplit { m: usize, r: usize },
    /// Raises the coordinates in the subset to the matching powers
    /// (principal branch).
    Subordinate { subset: IndexSubset, gammas: Vec<f64> },
    /// Reverses the enumeration order inside consecutive blocks of the given
    /// length; a bijection of the index set.
    Reindex { block: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `a_j + k_j b_j`, `k ∈ ℕ₀^n`.
    AffineLattice {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    /// `a_j + k_j^{γ_j} b_j`, `k ∈ ℕ^n`.
    PowerLattice {
        a: Vec<f64>,
        b: Vec<f64>,
        gamma: Vec<f64>,
    },
    /// `1 + i k_j^{γ_j}`, `k ∈ ℕ^n`.
    ImaginaryPower {
        gamma: Vec<f64>,
    },
    /// Tuples of points of one-dimensional factors, ordered by the pairing.
    ProductLattice {
        factors: Vec<SequenceFamily>,
        pairing: Pairing,
    },
    /// Integer points `k ∈ ℕ²` with `arg(k₁ + ik₂) ≤ θ`, by increasing
    /// `|k|²` then lexicographically.
    SectorLattice {
        theta: f64,
    },
    Explicit {
        name: String,
        source: ExplicitSource,
    },
    Derived {
        base: Box<SequenceFamily>,
        derivation: Derivation,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFamily {
    dim: usize,
    kind: FamilyKind,
}

fn positive(name: &str, v: &[f64]) -> Result<(), SequenceError> {
    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(SequenceError::InvalidParameter(format!("{name} entries must be positive, got {v:?}")));
    }
    Ok(())
}

fn same_len(expected: usize, name: &str, v: &[f64]) -> Result<(), SequenceError> {
    if v.len() != expected {
        return Err(SequenceError::InvalidParameter(format!("{name} has {} entries, expected {expected}", v.len())));
    }
    Ok(())
}

impl SequenceFamily {
    pub fn affine(a: Vec<f64>, b: Vec<f64>) -> Result<Self, SequenceError> {
        let n = a.len();
        if n == 0 {
            return Err(SequenceError::InvalidParameter("dimension must be positive".into()));
        }
        same_len(n, "b", &b)?;
        positive("a", &a)?;
        positive("b", &b)?;
        Ok(Self { dim: n, kind: FamilyKind::AffineLattice { a, b } })
    }

    pub fn power(a: Vec<f64>, b: Vec<f64>, gamma: Vec<f64>) -> Result<Self, SequenceError> {
        let n = a.len();
        if n == 0 {
            return Err(SequenceError::InvalidParameter("dimension must be positive".into()));
        }
        same_len(n, "b", &b)?;
        same_len(n, "gamma", &gamma)?;
        positive("a", &a)?;
        positive("b", &b)?;
        positive("gamma", &gamma)?;
        Ok(Self { dim: n, kind: FamilyKind::PowerLattice { a, b, gamma } })
    }

    pub fn imaginary_power(gamma: Vec<f64>) -> Result<Self, SequenceError> {
        if gamma.is_empty() {
            return Err(SequenceError::InvalidParameter("dimension must be positive".into()));
        }
        if gamma.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return Err(SequenceError::InvalidParameter(format!("gamma entries must lie in (0,1), got {gamma:?}")));
        }
        Ok(Self { dim: gamma.len(), kind: FamilyKind::ImaginaryPower { gamma } })
    }

    pub fn product(factors: Vec<SequenceFamily>, pairing: Pairing) -> Result<Self, SequenceError> {
        if factors.is_empty() {
            return Err(SequenceError::InvalidParameter("a product needs at least one factor".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.dim != 1) {
            return Err(SequenceError::InvalidParameter(format!(
                "product factors must be one-dimensional, got dimension {}",
                f.dim
            )));
        }
        Ok(Self { dim: factors.len(), kind: FamilyKind::ProductLattice { factors, pairing } })
    }

    pub fn sector(theta: f64) -> Result<Self, SequenceError> {
        if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
            return Err(SequenceError::InvalidParameter(format!("theta must lie in (0, π/2), got {theta}")));
        }
        Ok(Self { dim: 2, kind: FamilyKind::SectorLattice { theta } })
    }

    pub fn finite(name: impl Into<String>, points: Vec<Point>) -> Result<Self, SequenceError> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(SequenceError::InvalidParameter("an explicit list needs at least one nonempty point".into()));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(SequenceError::InvalidParameter("explicit points must share one dimension".into()));
        }
        if points.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SequenceError::InvalidParameter("explicit points must be finite".into()));
        }
        let mut seen = HashSet::new();
        for p in &points {
            let key: Vec<(u64, u64)> = p.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect();
            if !seen.insert(key) {
                return Err(SequenceError::InvalidParameter(format!("repeated point {p:?} in explicit list")));
            }
        }
        Ok(Self { dim, kind: FamilyKind::Explicit { name: name.into(), source: ExplicitSource::Finite(points) } })
    }

    pub fn generated(generator: Generator) -> Result<Self, SequenceError> {
        let name = match &generator {
            Generator::Diagonal { offset: 0 } => "diag-kk".to_string(),
            Generator::Diagonal { offset } => format!("diag:offset={offset}"),
            Generator::Doetsch => "doetsch".into(),
            Generator::Rays { c, d } => format!("rays:c={};d={}", join(c), join(d)),
            Generator::Cone => "cone".into(),
            Generator::Strip { width } => {
                if *width == 0 {
                    return Err(SequenceError::InvalidParameter("strip width must be positive".into()));
                }
                format!("strip:width={width}")
            }
        };
        if let Generator::Rays { c, d } = &generator {
            if c.iter().chain(d).any(|&x| x == 0) {
                return Err(SequenceError::InvalidParameter("ray slopes must be positive integers".into()));
            }
        }
        Ok(Self {
            dim: generator.dim(),
            kind: FamilyKind::Explicit { name, source: ExplicitSource::Generator(generator) },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Applies a derivation; the result enumerates the pointwise-derived points.
    pub fn derive(&self, derivation: Derivation) -> Result<Self, SequenceError> {
        let dim = match &derivation {
            Derivation::Shift { z } => {
                if z.len() != self.dim {
                    return Err(SequenceError::InvalidDerivation(format!(
                        "shift has {} components for a {}-dimensional family",
                        z.len(),
                        self.dim
                    )));
                }
                self.dim
            }
            Derivation::Project { subset } => {
                if subset.max_index() >= self.dim {
                    return Err(SequenceError::InvalidDerivation(format!(
                        "projection {:?} exceeds dimension {}",
                        subset.coords(),
                        self.dim
                    )));
                }
                subset.len()
            }
            Derivation::ResidueSplit { m, r } => {
                if *m == 0 || r >= m {
                    return Err(SequenceError::InvalidDerivation(format!("need 0 <= r < m, got m={m}, r={r}")));
                }
                self.dim
            }
            Derivation::Subordinate { subset, gammas } => {
                if subset.max_index() >= self.dim || subset.len() != gammas.len() {
                    return Err(SequenceError::InvalidDerivation(
                        "subordination subset and orders do not match the family".into(),
                    ));
                }
                if gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
                    return Err(SequenceError::InvalidDerivation(format!("orders must lie in (0,1), got {gammas:?}")));
                }
                self.dim
            }
            Derivation::Reindex { block } => {
                if *block == 0 {
                    return Err(SequenceError::InvalidDerivation("reindex block must be positive".into()));
                }
                self.dim
            }
        };
        Ok(Self { dim, kind: FamilyKind::Derived { base: Box::new(self.clone()), derivation } })
    }

    /// Number of points when the family is finite.
    pub fn finite_len(&self) -> Option<usize> {
        match &self.kind {
            FamilyKind::Explicit { source: ExplicitSource::Finite(p), .. } => Some(p.len()),
            FamilyKind::ProductLattice { factors, .. } => {
                factors.iter().map(|f| f.finite_len()).try_fold(1usize, |acc, l| l.map(|l| acc * l))
            }
            FamilyKind::Derived { base, derivation } => {
                let len = base.finite_len()?;
                Some(match derivation {
                    Derivation::ResidueSplit { m, r } => (1..=len).filter(|i| i % m == *r).count(),
                    _ => len,
                })
            }
            _ => None,
        }
    }

    /// Known witness id when the family is one of the built-in annihilated
    /// sequences.
    pub fn known_witness(&self) -> Option<String> {
        match &self.kind {
            FamilyKind::Explicit { source: ExplicitSource::Generator(g), .. } => match g {
                Generator::Diagonal { offset: 0 } => Some("diagonal".into()),
                Generator::Doetsch => Some("dech".into()),
                Generator::Rays { c, d } => Some(format!("ray:c={};d={}", join(c), join(d))),
                _ => None,
            },
            _ => None,
        }
    }

    /// The first `n` points.
    pub fn enumerate(&self, n: usize) -> Result<Vec<Point>, SequenceError> {
        if n == 0 {
            return Err(SequenceError::InvalidParameter("prefix length must be at least 1".into()));
        }
        if let Some(len) = self.finite_len() {
            if len < n {
                return Err(SequenceError::Exhausted { requested: n, available: len });
            }
        }
        let pts = match &self.kind {
            FamilyKind::AffineLattice { a, b } => lattice_tuples(self.dim, n, Pairing::CantorDiagonal, |_| true)
                .into_iter()
                .map(|k| (0..self.dim).map(|j| Complex64::new(a[j] + k[j] as f64 * b[j], 0.0)).collect())
                .collect(),
            FamilyKind::PowerLattice { a, b, gamma } => lattice_tuples(self.dim, n, Pairing::CantorDiagonal, |_| true)
                .into_iter()
                .map(|k| {
                    (0..self.dim)
                        .map(|j| Complex64::new(a[j] + ((k[j] + 1) as f64).powf(gamma[j]) * b[j], 0.0))
                        .collect()
                })
                .collect(),
            FamilyKind::ImaginaryPower { gamma } => lattice_tuples(self.dim, n, Pairing::CantorDiagonal, |_| true)
                .into_iter()
                .map(|k| (0..self.dim).map(|j| Complex64::new(1.0, ((k[j] + 1) as f64).powf(gamma[j]))).collect())
                .collect(),
            FamilyKind::ProductLattice { factors, pairing } => {
                let lens: Vec<Option<usize>> = factors.iter().map(|f| f.finite_len()).collect();
                let tuples = lattice_tuples(self.dim, n, *pairing, |k| {
                    k.iter().zip(&lens).all(|(&i, l)| l.is_none_or(|l| i < l))
                });
                let mut columns = Vec::with_capacity(factors.len());
                for (j, f) in factors.iter().enumerate() {
                    let depth = tuples.iter().map(|k| k[j]).max().unwrap_or(0) + 1;
                    columns.push(f.enumerate(depth)?);
                }
                tuples.into_iter().map(|k| k.iter().enumerate().map(|(j, &i)| columns[j][i][0]).collect()).collect()
            }
            FamilyKind::SectorLattice { theta } => sector_points(*theta, n),
            FamilyKind::Explicit { source, .. } => match source {
                ExplicitSource::Finite(p) => p[..n].to_vec(),
                ExplicitSource::Generator(g) => generate(g, n),
            },
            FamilyKind::Derived { base, derivation } => derive_points(base, derivation, n)?,
        };
        Ok(pts)
    }
}

pub(crate) fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Compositions of `s` into `n` nonnegative parts, lexicographically
/// increasing.
fn compositions(n: usize, s: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(prefix: &mut Vec<usize>, n: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=left {
            prefix.push(first);
            rec(prefix, n, left - first, out);
            prefix.pop();
        }
    }
    rec(&mut Vec::with_capacity(n), n, s, out);
}

/// First `count` accepted tuples of `ℕ₀^n` under the pairing. Stops early
/// when a whole diagonal shell is rejected after at least one was accepted
/// past every finite extent; callers only pass finite acceptance sets whose
/// total size is at least `count`.
pub(crate) fn lattice_tuples<F: Fn(&[usize]) -> bool>(
    n: usize,
    count: usize,
    pairing: Pairing,
    accept: F,
) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(count);
    let mut shell = Vec::new();
    for s in 0.. {
        shell.clear();
        compositions(n, s, &mut shell);
        if pairing == Pairing::ReverseDiagonal {
            shell.reverse();
        }
        for k in shell.drain(..) {
            if accept(&k) {
                out.push(k);
                if out.len() == count {
                    return out;
                }
            }
        }
    }
    unreachable!()
}

fn sector_points(theta: f64, n: usize) -> Vec<Point> {
    let slope = theta.tan();
    let mut radius = (2.0 * (n as f64 / theta).sqrt()).ceil() as i64 + 2;
    loop {
        let mut pts: Vec<(i64, i64)> = Vec::new();
        for k1 in 1..=radius {
            for k2 in 1..=radius {
                if (k2 as f64).atan2(k1 as f64) <= theta + 1e-12 && (k2 as f64) <= k1 as f64 * slope + 1e-9 {
                    pts.push((k1, k2));
                }
            }
        }
        pts.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
        if pts.len() >= n && {
            let (a, b) = pts[n - 1];
            a * a + b * b <= radius * radius
        } {
            return pts[..n]
                .iter()
                .map(|&(a, b)| vec![Complex64::new(a as f64, 0.0), Complex64::new(b as f64, 0.0)])
                .collect();
        }
        radius *= 2;
    }
}

fn int_point(a: i64, b: i64) -> Point {
    vec![Complex64::new(a as f64, 0.0), Complex64::new(b as f64, 0.0)]
}

fn generate(g: &Generator, n: usize) -> Vec<Point> {
    match g {
        Generator::Diagonal { offset } => {
            let start = 1.max(1 - offset);
            (start..).take(n).map(|k| int_point(k, k + offset)).collect()
        }
        Generator::Doetsch => {
            let mut out = vec![vec![Complex64::new(0.0, -1.0)]];
            let mut m = 2.0;
            while out.len() < n {
                out.push(vec![Complex64::new(0.0, m)]);
                out.push(vec![Complex64::new(0.0, -m)]);
                m += 1.0;
            }
            out.truncate(n);
            out
        }
        Generator::Rays { c, d } => {
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(n);
            for k in 1i64.. {
                let mut candidates = vec![(k, 1), (1, k)];
                candidates.extend(c.iter().map(|&cj| (cj as i64 * k, k)));
                candidates.extend(d.iter().map(|&dj| (k, dj as i64 * k)));
                for p in candidates {
                    if seen.insert(p) {
                        out.push(int_point(p.0, p.1));
                        if out.len() == n {
                            return out;
                        }
                    }
                }
            }
            unreachable!()
        }
        Generator::Cone => {
            let mut out = Vec::with_capacity(n);
            for s in 2i64.. {
                for k1 in 1..s {
                    let k2 = s - k1;
                    if k1 >= k2 {
                        out.push(int_point(k1, k2));
                        if out.len() == n {
                            return out;
                        }
                    }
                }
            }
            unreachable!()
        }
        Generator::Strip { width } => {
            let w = *width as i64;
            let mut out = Vec::with_capacity(n);
            for s in 2i64.. {
                for k1 in 1..s {
                    let k2 = s - k1;
                    if k2 <= w {
                        out.push(int_point(k1, k2));
                        if out.len() == n {
                            return out;
                        }
                    }
                }
            }
            unreachable!()
        }
    }
}

fn derive_points(base: &SequenceFamily, d: &Derivation, n: usize) -> Result<Vec<Point>, SequenceError> {
    Ok(match d {
        Derivation::Shift { z } => {
            base.enumerate(n)?.into_iter().map(|p| p.iter().zip(z).map(|(x, s)| x + s).collect()).collect()
        }
        Derivation::Project { subset } => {
            base.enumerate(n)?.into_iter().map(|p| subset.coords().iter().map(|&j| p[j]).collect()).collect()
        }
        Derivation::ResidueSplit { m, r } => {
            // 1-based indices r, r+m, … (or m, 2m, … when r = 0)
            let first = if *r == 0 { *m } else { *r };
            let need = first + (n - 1) * m;
            let pts = base.enumerate(need)?;
            (0..n).map(|i| pts[first + i * m - 1].clone()).collect()
        }
        Derivation::Subordinate { subset, gammas } => base
            .enumerate(n)?
            .into_iter()
            .map(|mut p| {
                for (&j, &g) in subset.coords().iter().zip(gammas) {
                    p[j] = p[j].powf(g);
                }
                p
            })
            .collect(),
        Derivation::Reindex { block } => {
            let mut need = n.div_ceil(*block) * block;
            if let Some(len) = base.finite_len() {
                need = need.min(len);
            }
            let mut pts = base.enumerate(need)?;
            for chunk in pts.chunks_mut(*block) {
                chunk.reverse();
            }
            pts.truncate(n);
            pts
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(p: &[Point]) -> Vec<Vec<f64>> {
        p.iter().map(|q| q.iter().map(|z| z.re).collect()).collect()
    }

    fn naturals() -> SequenceFamily {
        SequenceFamily::affine(vec![1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn affine_prefix() {
        assert_eq!(reals(&naturals().enumerate(3).unwrap()), vec![vec![1.0], vec![2.0], vec![3.0]]);
        let f = SequenceFamily::affine(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(reals(&f.enumerate(3).unwrap()), vec![vec![1.0, 2.0], vec![1.0, 5.0], vec![2.0, 2.0]]);
    }

    #[test]
    fn product_uses_diagonal_pairing() {
        let p = SequenceFamily::product(vec![naturals(), naturals()], Pairing::CantorDiagonal).unwrap();
        assert_eq!(reals(&p.enumerate(3).unwrap()), vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 1.0]]);
        let r = SequenceFamily::product(vec![naturals(), naturals()], Pairing::ReverseDiagonal).unwrap();
        assert_eq!(reals(&r.enumerate(3).unwrap()), vec![vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0]]);
    }

    #[test]
    fn sector_order_matches_brute_force() {
        let f = SequenceFamily::sector(std::f64::consts::FRAC_PI_4).unwrap();
        assert_eq!(reals(&f.enumerate(3).unwrap()), vec![vec![1.0, 1.0], vec![2.0, 1.0], vec![2.0, 2.0]]);
        // brute force over a big square
        let theta = 0.4;
        let mut brute: Vec<(i64, i64)> = (1..60)
            .flat_map(|a| (1..60).map(move |b| (a, b)))
            .filter(|&(a, b)| (b as f64).atan2(a as f64) <= theta)
            .collect();
        brute.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
        let got = SequenceFamily::sector(theta).unwrap().enumerate(200).unwrap();
        for (p, q) in got.iter().zip(&brute) {
            assert_eq!((p[0].re as i64, p[1].re as i64), *q);
        }
    }

    #[test]
    fn derivation_examples() {
        let shifted = naturals().derive(Derivation::Shift { z: vec![Complex64::new(0.0, 1.0)] }).unwrap();
        assert_eq!(shifted.enumerate(2).unwrap()[1][0], Complex64::new(2.0, 1.0));
        let squares = SequenceFamily::power(vec![1e-300], vec![1.0], vec![2.0]).unwrap();
        let roots = squares
            .derive(Derivation::Subordinate { subset: IndexSubset::full(1), gammas: vec![0.5] })
            .unwrap()
            .enumerate(4)
            .unwrap();
        for (i, p) in roots.iter().enumerate() {
            assert!((p[0].re - (i + 1) as f64).abs() < 1e-12 && p[0].im.abs() < 1e-12);
        }
        let evens = naturals().derive(Derivation::ResidueSplit { m: 2, r: 0 }).unwrap();
        assert_eq!(reals(&evens.enumerate(3).unwrap()), vec![vec![2.0], vec![4.0], vec![6.0]]);
    }

    #[test]
    fn residue_classes_partition_prefix() {
        let base = SequenceFamily::product(vec![naturals(), naturals()], Pairing::CantorDiagonal).unwrap();
        let m = 3;
        let total = base.enumerate(60).unwrap();
        let mut merged = Vec::new();
        for r in 0..m {
            let part = base.derive(Derivation::ResidueSplit { m, r }).unwrap().enumerate(20).unwrap();
            merged.extend(part);
        }
        assert_eq!(merged.len(), total.len());
        for p in &total {
            assert_eq!(merged.iter().filter(|q| *q == p).count(), 1);
        }
    }

    #[test]
    fn reindex_is_a_permutation_of_prefix_blocks() {
        let base = naturals();
        let re = base.derive(Derivation::Reindex { block: 4 }).unwrap();
        assert_eq!(
            reals(&re.enumerate(6).unwrap()),
            vec![vec![4.0], vec![3.0], vec![2.0], vec![1.0], vec![8.0], vec![7.0]]
        );
    }

    #[test]
    fn generators() {
        let d = SequenceFamily::generated(Generator::Doetsch).unwrap().enumerate(5).unwrap();
        let ims: Vec<f64> = d.iter().map(|p| p[0].im).collect();
        assert_eq!(ims, vec![-1.0, 2.0, -2.0, 3.0, -3.0]);
        let rays = SequenceFamily::generated(Generator::Rays { c: vec![2], d: vec![] }).unwrap();
        let pts = rays.enumerate(6).unwrap();
        assert_eq!(
            reals(&pts),
            vec![vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0], vec![4.0, 2.0], vec![3.0, 1.0], vec![1.0, 3.0]]
        );
        let cone = SequenceFamily::generated(Generator::Cone).unwrap().enumerate(4).unwrap();
        assert_eq!(reals(&cone), vec![vec![1.0, 1.0], vec![2.0, 1.0], vec![2.0, 2.0], vec![3.0, 1.0]]);
    }

    #[test]
    fn finite_lists_and_errors() {
        let f = SequenceFamily::finite("pts", vec![vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(2.0, 0.0)]])
            .unwrap();
        assert_eq!(f.enumerate(2).unwrap().len(), 2);
        assert!(matches!(f.enumerate(3), Err(SequenceError::Exhausted { requested: 3, available: 2 })));
        assert!(SequenceFamily::finite("dup", vec![vec![Complex64::new(1.0, 0.0)]; 2]).is_err());
        assert!(naturals().enumerate(0).is_err());
        assert!(naturals().derive(Derivation::ResidueSplit { m: 2, r: 2 }).is_err());
        assert!(naturals().derive(Derivation::Shift { z: vec![] }).is_err());
        let fin_prod = SequenceFamily::product(vec![f.clone(), f], Pairing::CantorDiagonal).unwrap();
        assert_eq!(fin_prod.enumerate(4).unwrap().len(), 4);
        assert!(fin_prod.enumerate(5).is_err());
    }

    #[test]
    fn projection_dimension() {
        let f = SequenceFamily::affine(vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 2.0]).unwrap();
        let p = f.derive(Derivation::Project { subset: IndexSubset::new(vec![0, 2], 3).unwrap() }).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.enumerate(5).unwrap().len(), 5);
    }
}
