use serde::{Deserialize, Serialize};

use super::family::{Derivation, ExplicitSource, FamilyKind, Point, SequenceFamily};
use super::SequenceError;

pub const DEFAULT_MUNTZ_PREFIX: usize = 500;
const DENSITY_GRID: usize = 16;
const IM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImConstancy {
    pub constant: bool,
    /// Imaginary part of the first point on this axis.
    pub value: f64,
}

/// Finite-prefix evidence for the three lattice-subset conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuntzReport {
    /// Analytic bound when available, else the sampled minimum.
    pub separation: f64,
    pub sampled_separation: f64,
    pub analytic_separation: Option<f64>,
    /// Largest `card{Σ|Re λ^j − 1| ≤ t} / t^n` over the grid.
    pub density: f64,
    /// `d(T)/d(T/4)`; a vanishing density drives this below 1/2.
    pub density_ratio: f64,
    pub density_positive: bool,
    pub t_max: f64,
    pub grid: Vec<(f64, f64)>,
    pub im_constant: Vec<ImConstancy>,
    pub prefix: usize,
    pub pass: bool,
    pub note: String,
}

/// `min_{j} b_j` for lattices whose distinct points differ by at least that
/// much in L¹ of real parts.
fn analytic_separation(fam: &SequenceFamily) -> Option<f64> {
    match fam.kind() {
        FamilyKind::AffineLattice { b, .. } => Some(b.iter().cloned().fold(f64::INFINITY, f64::min)),
        FamilyKind::ProductLattice { factors, .. } => {
            factors.iter().map(analytic_separation).try_fold(f64::INFINITY, |acc, s| s.map(|s| acc.min(s)))
        }
        FamilyKind::Explicit { source: ExplicitSource::Generator(g), .. } if g.dim() == 2 => Some(1.0),
        FamilyKind::SectorLattice { .. } => Some(1.0),
        FamilyKind::Derived {
            base,
            derivation: Derivation::Shift { .. } | Derivation::Reindex { .. } | Derivation::ResidueSplit { .. },
        } => analytic_separation(base),
        _ => None,
    }
}

fn l1_re(p: &Point, q: &Point) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a.re - b.re).abs()).sum()
}

/// Minimum L¹ distance between real parts over distinct pairs.
pub fn sampled_separation(points: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min(l1_re(p, q));
        }
    }
    best
}

/// Minimum Euclidean distance between prefix points.
pub fn min_pairwise_distance(points: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            let d: f64 = p.iter().zip(q).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            best = best.min(d);
        }
    }
    best
}

/// Checks the separation, density and imaginary-part conditions on the first
/// `prefix` points. `t_max` defaults to 0.9 times the distance of the last
/// prefix point from `(1,…,1)`.
pub fn muntz_check(fam: &SequenceFamily, t_max: Option<f64>, prefix: usize) -> Result<MuntzReport, SequenceError> {
    let n = fam.finite_len().map_or(prefix, |l| l.min(prefix));
    let pts = fam.enumerate(n)?;
    if let Some(bad) = pts.iter().flatten().find(|z| z.re < 1.0 - 1e-12) {
        return Err(SequenceError::Precondition(format!("need Re λ ≥ 1 on every axis, found {bad}")));
    }
    let dim = fam.dim();
    let dist: Vec<f64> = pts.iter().map(|p| p.iter().map(|z| z.re - 1.0).sum()).collect();
    let t_max = match t_max {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(SequenceError::InvalidParameter(format!("T_max must be positive, got {t}"))),
        None => 0.9 * dist.last().copied().unwrap_or(0.0),
    };
    let count = |t: f64| dist.iter().filter(|&&d| d <= t).count() as f64;
    let density_at = |t: f64| count(t) / t.powi(dim as i32);
    let grid: Vec<(f64, f64)> = if t_max > 0.0 {
        (0..DENSITY_GRID)
            .map(|i| {
                let t = t_max * 4f64.powf(i as f64 / (DENSITY_GRID - 1) as f64 - 1.0);
                (t, density_at(t))
            })
            .collect()
    } else {
        Vec::new()
    };
    let density = grid.iter().map(|g| g.1).fold(0.0, f64::max);
    let (d_lo, d_hi) = match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => (a.1, b.1),
        _ => (0.0, 0.0),
    };
    let density_ratio = if d_lo > 0.0 { d_hi / d_lo } else { 0.0 };
    let density_positive = d_hi > 0.0 && density_ratio >= 0.5;
    let im_constant: Vec<ImConstancy> = (0..dim)
        .map(|j| {
            let value = pts[0][j].im;
            ImConstancy { constant: pts.iter().all(|p| (p[j].im - value).abs() <= IM_TOL), value }
        })
        .collect();
    let sampled = sampled_separation(&pts);
    let analytic = analytic_separation(fam);
    let separation = analytic.unwrap_or(sampled);
    let pass = separation > 0.0 && density_positive && im_constant.iter().all(|c| c.constant);
    Ok(MuntzReport {
        separation,
        sampled_separation: sampled,
        analytic_separation: analytic,
        density,
        density_ratio,
        density_positive,
        t_max,
        grid,
        im_constant,
        prefix: n,
        pass,
        note: "the density condition is a limsup; this is finite-prefix evidence, not a proof".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn fam(s: &str) -> SequenceFamily {
        SequenceFamily::parse(s).unwrap()
    }

    /// Lattice points of ℕ² with (k₁−1)+(k₂−1) ≤ t, counted by brute force.
    fn brute_lattice_count(t: f64) -> usize {
        let m = t.floor() as usize;
        (0..=m).flat_map(|a| (0..=m).map(move |b| (a, b))).filter(|(a, b)| (a + b) as f64 <= t).count()
    }

    #[test]
    fn full_lattice_passes() {
        let f = fam("product:(affine:n=1;a=1;b=1)x(affine:n=1;a=1;b=1)");
        let r = muntz_check(&f, None, 500).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.separation >= 1.0 && r.sampled_separation >= 1.0);
        for &(t, d) in &r.grid {
            assert_eq!(d, brute_lattice_count(t) as f64 / (t * t));
        }
        // count (m+1)(m+2)/2 over m² tends to 1/2
        assert!((r.grid.last().unwrap().1 - 0.5).abs() < 0.1);
        let long = muntz_check(&f, Some(150.0), 12_000).unwrap();
        assert!((long.grid.last().unwrap().1 - 0.5).abs() < 0.02);
    }

    #[test]
    fn diagonal_fails_density() {
        let r = muntz_check(&fam("explicit:diag-kk"), None, 500).unwrap();
        assert!(!r.density_positive && !r.pass);
        assert!(r.grid.last().unwrap().1 < 1e-3);
        assert!(r.im_constant.iter().all(|c| c.constant));
    }

    #[test]
    fn moving_imaginary_part_fails() {
        let pts: Vec<Point> = (1..=50).map(|k| vec![Complex64::new(k as f64, k as f64)]).collect();
        let r = muntz_check(&SequenceFamily::finite("kik", pts).unwrap(), None, 50).unwrap();
        assert!(!r.im_constant[0].constant && !r.pass);
    }

    #[test]
    fn cone_passes_and_strip_fails() {
        assert!(muntz_check(&fam("explicit:cone"), None, 500).unwrap().pass);
        assert!(!muntz_check(&fam("explicit:strip:width=2"), None, 500).unwrap().pass);
    }

    #[test]
    fn precondition_and_distance() {
        assert!(muntz_check(&fam("affine:n=1;a=0.5;b=1"), None, 10).is_err());
        let pts = vec![vec![Complex64::new(0.0, 0.0)], vec![Complex64::new(3.0, 4.0)]];
        assert_eq!(min_pairwise_distance(&pts), 5.0);
    }
}
