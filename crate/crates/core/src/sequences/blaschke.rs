use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::{Derivation, FamilyKind, SequenceFamily};
use super::SequenceError;

/// `1 − |(λ−1)/(λ+1)|`.
pub fn blaschke_term(lambda: Complex64) -> Result<f64, SequenceError> {
    if lambda == Complex64::new(-1.0, 0.0) {
        return Err(SequenceError::InvalidParameter("the Blaschke term has a pole at λ = −1".into()));
    }
    Ok(1.0 - ((lambda - 1.0) / (lambda + 1.0)).norm())
}

/// Leading-order shape of `λ_k` in the 1-based index `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Profile {
    /// `λ_k ≈ scale · k^exponent · e^{i·angle}`.
    Sector {
        angle: f64,
        scale: f64,
        exponent: f64,
    },
    /// `λ_k ≈ re + i · scale · k^exponent`.
    Vertical {
        re: f64,
        scale: f64,
        exponent: f64,
    },
    Unknown,
}

impl Profile {
    /// `p` with `term_k ~ C k^{−p}`, when the profile fixes it.
    pub fn term_exponent(&self) -> Option<f64> {
        match *self {
            Profile::Sector { angle, exponent, .. } if angle.abs() < std::f64::consts::FRAC_PI_2 && exponent > 0.0 => {
                Some(exponent)
            }
            Profile::Vertical { re, exponent, .. } if re > 0.0 && exponent > 0.0 => Some(2.0 * exponent),
            _ => None,
        }
    }

    /// The constant `C` in `term_k ~ C k^{−p}`.
    pub fn term_constant(&self) -> Option<f64> {
        match *self {
            Profile::Sector { angle, scale, .. } => Some(2.0 * angle.cos() / scale),
            Profile::Vertical { re, scale, .. } => Some(2.0 * re / (scale * scale)),
            Profile::Unknown => None,
        }
    }
}

/// Asymptotic profile of a one-dimensional family, derived from its
/// parameters.
pub fn profile(fam: &SequenceFamily) -> Profile {
    if fam.dim() != 1 {
        return Profile::Unknown;
    }
    match fam.kind() {
        FamilyKind::AffineLattice { b, .. } => Profile::Sector { angle: 0.0, scale: b[0], exponent: 1.0 },
        FamilyKind::PowerLattice { b, gamma, .. } => Profile::Sector { angle: 0.0, scale: b[0], exponent: gamma[0] },
        FamilyKind::ImaginaryPower { gamma } => Profile::Vertical { re: 1.0, scale: 1.0, exponent: gamma[0] },
        FamilyKind::ProductLattice { factors, .. } => profile(&factors[0]),
        FamilyKind::Derived { base, derivation } if base.dim() == 1 => {
            let inner = profile(base);
            match (derivation, inner) {
                (_, Profile::Unknown) => Profile::Unknown,
                (Derivation::Reindex { .. }, p) => p,
                (Derivation::Shift { .. }, p @ Profile::Sector { .. }) => p,
                (Derivation::Shift { z }, Profile::Vertical { re, scale, exponent }) => {
                    let re = re + z[0].re;
                    if re > 0.0 {
                        Profile::Vertical { re, scale, exponent }
                    } else {
                        Profile::Unknown
                    }
                }
                (Derivation::ResidueSplit { m, .. }, Profile::Sector { angle, scale, exponent }) => {
                    Profile::Sector { angle, scale: scale * (*m as f64).powf(exponent), exponent }
                }
                (Derivation::ResidueSplit { m, .. }, Profile::Vertical { re, scale, exponent }) => {
                    Profile::Vertical { re, scale: scale * (*m as f64).powf(exponent), exponent }
                }
                (Derivation::Subordinate { gammas, .. }, Profile::Sector { angle, scale, exponent }) => {
                    let g = gammas[0];
                    Profile::Sector { angle: g * angle, scale: scale.powf(g), exponent: g * exponent }
                }
                (Derivation::Subordinate { gammas, .. }, Profile::Vertical { scale, exponent, .. }) => {
                    let g = gammas[0];
                    Profile::Sector {
                        angle: g * std::f64::consts::FRAC_PI_2,
                        scale: scale.powf(g),
                        exponent: g * exponent,
                    }
                }
                _ => Profile::Unknown,
            }
        }
        _ => Profile::Unknown,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlaschkeOutcome {
    Divergent,
    Convergent,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeReport {
    pub outcome: BlaschkeOutcome,
    pub profile: Profile,
    /// `p` in the limit comparison `term_k ~ C k^{−p}`.
    pub term_exponent: Option<f64>,
    pub term_constant: Option<f64>,
    /// `(N, Σ_{k≤N} term_k)` on the enumerated prefix.
    pub partial_sums: Vec<(usize, f64)>,
    /// Least-squares slope of `−log term_k` against `log k` over the last
    /// nine tenths of the prefix; evidence only.
    pub fitted_exponent: Option<f64>,
    pub min_re: f64,
    pub prefix: usize,
    pub basis: String,
}

pub const DEFAULT_BLASCHKE_PREFIX: usize = 1000;

fn fitted_slope(terms: &[f64]) -> Option<f64> {
    let start = terms.len() / 10;
    let pts: Vec<(f64, f64)> = terms
        .iter()
        .enumerate()
        .skip(start.max(1))
        .filter(|(_, t)| **t > 0.0)
        .map(|(i, t)| (((i + 1) as f64).ln(), -t.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Decides divergence of `Σ [1 − |(λ_k−1)/(λ_k+1)|]`.
///
/// Parametric families are decided by limit comparison with `k^{−p}`;
/// finite families converge trivially; everything else is `Unknown` with
/// partial sums and a fitted decay exponent as evidence.
pub fn blaschke_sum_classify(fam: &SequenceFamily, prefix: usize) -> Result<BlaschkeReport, SequenceError> {
    if fam.dim() != 1 {
        return Err(SequenceError::InvalidParameter(format!(
            "the Blaschke test needs a one-dimensional family, got dimension {}",
            fam.dim()
        )));
    }
    let finite = fam.finite_len();
    let n = finite.map_or(prefix, |l| l.min(prefix)).max(1);
    let pts = fam.enumerate(n)?;
    let min_re = pts.iter().map(|p| p[0].re).fold(f64::INFINITY, f64::min);
    if !(min_re > 0.0) {
        return Err(SequenceError::Precondition(format!(
            "Re λ_k is not bounded below by a positive δ on the prefix (min Re λ_k = {min_re})"
        )));
    }
    let terms = pts.iter().map(|p| blaschke_term(p[0])).collect::<Result<Vec<_>, _>>()?;
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    let mut mark = 10;
    for (i, t) in terms.iter().enumerate() {
        acc += t;
        if i + 1 == mark || i + 1 == n {
            partial_sums.push((i + 1, acc));
            mark *= 10;
        }
    }
    let prof = profile(fam);
    let p = prof.term_exponent();
    let (outcome, basis) = if let Some(len) = finite {
        (BlaschkeOutcome::Convergent, format!("finite family of {len} points"))
    } else if let Some(p) = p {
        let outcome = if p <= 1.0 { BlaschkeOutcome::Divergent } else { BlaschkeOutcome::Convergent };
        (outcome, format!("limit comparison with Σ k^-{p}"))
    } else {
        (BlaschkeOutcome::Unknown, "no asymptotic profile; prefix evidence only".to_string())
    };
    Ok(BlaschkeReport {
        outcome,
        term_constant: p.and(prof.term_constant()),
        profile: prof,
        term_exponent: p,
        partial_sums,
        fitted_exponent: fitted_slope(&terms),
        min_re,
        prefix: n,
        basis,
    })
}

fn require_right_half_plane(lambda: Complex64, gamma: f64) -> Result<(), SequenceError> {
    if !(lambda.re > 0.0) {
        return Err(SequenceError::Precondition(format!("need Re λ > 0, got λ = {lambda}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SequenceError::InvalidParameter(format!("γ must lie in (0,1), got {gamma}")));
    }
    Ok(())
}

/// `|(λ−1)/(λ+1)| − |(λ^γ−1)/(λ^γ+1)|` with the principal branch.
pub fn subp_margin(lambda: Complex64, gamma: f64) -> Result<f64, SequenceError> {
    require_right_half_plane(lambda, gamma)?;
    let lg = lambda.powf(gamma);
    Ok(((lambda - 1.0) / (lambda + 1.0)).norm() - ((lg - 1.0) / (lg + 1.0)).norm())
}

/// The polar form `r^{1+γ}cos γφ + r^{γ−1}cos γφ − r^{2γ}cos φ − cos φ`,
/// which has the sign of [`subp_margin`].
pub fn ocv_margin(lambda: Complex64, gamma: f64) -> Result<f64, SequenceError> {
    require_right_half_plane(lambda, gamma)?;
    let (r, phi) = lambda.to_polar();
    let cg = (gamma * phi).cos();
    Ok(r.powf(1.0 + gamma) * cg + r.powf(gamma - 1.0) * cg - r.powf(2.0 * gamma) * phi.cos() - phi.cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IndexSubset;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn term_values() {
        assert_eq!(blaschke_term(c(1.0, 0.0)).unwrap(), 1.0);
        assert!((blaschke_term(c(3.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((blaschke_term(c(1.0, 1.0)).unwrap() - (1.0 - 1.0 / 5f64.sqrt())).abs() < 1e-15);
        assert!(blaschke_term(c(-1.0, 0.0)).is_err());
        assert!(blaschke_term(c(0.0, 7.0)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn table() {
        let out = |s: &str| blaschke_sum_classify(&SequenceFamily::parse(s).unwrap(), 1000).unwrap().outcome;
        assert_eq!(out("affine:n=1;a=1;b=1"), BlaschkeOutcome::Divergent);
        assert_eq!(out("power:n=1;a=1;b=1;gamma=1"), BlaschkeOutcome::Divergent);
        assert_eq!(out("power:n=1;a=1;b=1;gamma=1.5"), BlaschkeOutcome::Convergent);
        assert_eq!(out("impow:n=1;gamma=0.5"), BlaschkeOutcome::Divergent);
        assert_eq!(out("impow:n=1;gamma=0.6"), BlaschkeOutcome::Convergent);
        assert_eq!(out("explicit:list:1;2;3"), BlaschkeOutcome::Convergent);
        assert_eq!(out("affine:n=1;a=1;b=1|reindex=5|shift=1"), BlaschkeOutcome::Divergent);
    }

    #[test]
    fn profile_tracks_terms() {
        // the constant C of the comparison matches the actual tail terms
        for s in [
            "affine:n=1;a=1;b=2",
            "impow:n=1;gamma=0.3",
            "affine:n=1;a=1;b=1|subordinate=1:0.5",
            "impow:n=1;gamma=0.7|split=3:1",
        ] {
            let fam = SequenceFamily::parse(s).unwrap();
            let prof = profile(&fam);
            let (p, cst) = (prof.term_exponent().unwrap(), prof.term_constant().unwrap());
            let k = 200_000;
            let lam = fam.enumerate(k).unwrap()[k - 1][0];
            let ratio = blaschke_term(lam).unwrap() / (cst * (k as f64).powf(-p));
            assert!((ratio - 1.0).abs() < 0.05, "{s}: ratio {ratio}");
        }
    }

    #[test]
    fn subordinated_naturals_diverge() {
        let fam = SequenceFamily::affine(vec![1.0], vec![1.0])
            .unwrap()
            .derive(Derivation::Subordinate { subset: IndexSubset::full(1), gammas: vec![0.5] })
            .unwrap();
        let rep = blaschke_sum_classify(&fam, 1000).unwrap();
        assert_eq!(rep.outcome, BlaschkeOutcome::Divergent);
        assert_eq!(rep.term_exponent, Some(0.5));
        assert!((rep.fitted_exponent.unwrap() - 0.5).abs() < 0.05);
    }

    #[test]
    fn precondition() {
        let fam = SequenceFamily::parse("explicit:doetsch").unwrap();
        assert!(matches!(blaschke_sum_classify(&fam, 100), Err(SequenceError::Precondition(_))));
        assert!(blaschke_sum_classify(&SequenceFamily::parse("affine:n=2;a=1;b=1").unwrap(), 10).is_err());
    }

    #[test]
    fn subp_examples() {
        assert_eq!(subp_margin(c(1.0, 0.0), 0.3).unwrap(), 0.0);
        assert!((subp_margin(c(4.0, 0.0), 0.5).unwrap() - (0.6 - 1.0 / 3.0)).abs() < 1e-15);
        let (r, phi, g) = (2f64.sqrt(), std::f64::consts::FRAC_PI_4, 0.5);
        let polar = r.powf(1.0 + g) * (g * phi).cos() + r.powf(g - 1.0) * (g * phi).cos()
            - r.powf(2.0 * g) * phi.cos()
            - phi.cos();
        assert!(polar > 0.0);
        assert!((ocv_margin(c(1.0, 1.0), 0.5).unwrap() - polar).abs() < 1e-14);
        assert!(subp_margin(c(1.0, 1.0), 0.5).unwrap() > 0.0);
        assert!(subp_margin(c(0.0, 1.0), 0.5).is_err());
        assert!(subp_margin(c(1.0, 1.0), 1.0).is_err());
    }
}
