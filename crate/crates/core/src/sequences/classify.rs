use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::blaschke::{
    blaschke_sum_classify, profile, BlaschkeOutcome, BlaschkeReport, Profile, DEFAULT_BLASCHKE_PREFIX,
};
use super::family::{Derivation, FamilyKind, Point, SequenceFamily};
use super::muntz::{min_pairwise_distance, muntz_check, MuntzReport, DEFAULT_MUNTZ_PREFIX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Uniqueness,
    NotUniqueness,
    Inconclusive,
}

/// What a rule checked. Everything here is either an analytic quantity from
/// the family parameters or prefix evidence; the two are labelled apart in
/// `assumptions`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub family: String,
    pub trace: Vec<String>,
    pub witness: Option<String>,
    pub paper_asserted: bool,
    pub branch: String,
    pub assumptions: Vec<String>,
    pub prefix: usize,
    pub min_re: Option<f64>,
    pub max_abs_arg: Option<f64>,
    pub min_pairwise_distance: Option<f64>,
    pub blaschke: Option<BlaschkeReport>,
    pub muntz: Option<MuntzReport>,
    pub factors: Vec<Verdict>,
    pub base: Option<Box<Verdict>>,
}

impl Certificate {
    /// True when no rule recorded anything beyond the family itself.
    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
            && self.witness.is_none()
            && self.blaschke.is_none()
            && self.muntz.is_none()
            && self.factors.is_empty()
            && self.base.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub rule: String,
    pub certificate: Certificate,
}

impl Verdict {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("verdicts serialize")
    }
}

const NO_ACCUMULATION: &str =
    "no accumulation points: not checkable on finite data; the prefix minimum pairwise distance is recorded";

/// Prefix sizes used by the rule engine.
#[derive(Debug, Clone, Copy)]
pub struct Classifier {
    /// Points inspected for Re / arg / spacing evidence.
    pub prefix: usize,
    pub blaschke_prefix: usize,
    pub muntz_prefix: usize,
}

impl Default for Classifier {
    fn default() -> Self {
        Self { prefix: 200, blaschke_prefix: DEFAULT_BLASCHKE_PREFIX, muntz_prefix: DEFAULT_MUNTZ_PREFIX }
    }
}

struct Evidence {
    points: Vec<Point>,
    min_re: f64,
    max_abs_arg: f64,
    min_distance: f64,
}

impl Classifier {
    pub fn with_prefix(prefix: usize) -> Self {
        let d = Self::default();
        Self { prefix, blaschke_prefix: d.blaschke_prefix.max(prefix), muntz_prefix: d.muntz_prefix.max(prefix) }
    }

    fn evidence(&self, fam: &SequenceFamily) -> Option<Evidence> {
        let n = fam.finite_len().map_or(self.prefix, |l| l.min(self.prefix));
        let points = fam.enumerate(n).ok()?;
        let min_re = points.iter().flatten().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let max_abs_arg = points.iter().flatten().map(|z| z.arg().abs()).fold(0.0, f64::max);
        let min_distance = min_pairwise_distance(&points);
        Some(Evidence { points, min_re, max_abs_arg, min_distance })
    }

    fn certificate(&self, fam: &SequenceFamily) -> Certificate {
        let mut c = Certificate { family: fam.to_spec(), branch: "principal".into(), ..Default::default() };
        if let Some(e) = self.evidence(fam) {
            c.prefix = e.points.len();
            c.min_re = Some(e.min_re);
            c.max_abs_arg = Some(e.max_abs_arg);
            c.min_pairwise_distance = Some(e.min_distance);
        }
        c
    }

    fn verdict(status: Status, rule: &str, mut cert: Certificate, step: String) -> Verdict {
        cert.trace.push(step);
        Verdict { status, rule: rule.into(), certificate: cert }
    }

    fn inherit(&self, fam: &SequenceFamily, base: Verdict, rule_note: String) -> Verdict {
        let mut cert = self.certificate(fam);
        cert.witness = base.certificate.witness.clone();
        cert.paper_asserted = base.certificate.paper_asserted;
        cert.trace = base.certificate.trace.clone();
        cert.trace.push(rule_note);
        Verdict {
            status: base.status,
            rule: base.rule.clone(),
            certificate: Certificate { base: Some(Box::new(base)), ..cert },
        }
    }

    /// One-dimensional rules: known witnesses, the Blaschke test with and
    /// without a sector bound, and the subordination corollary.
    pub fn classify_1d(&self, fam: &SequenceFamily, delta: Option<f64>, theta: Option<f64>) -> Verdict {
        let mut cert = self.certificate(fam);
        if fam.dim() != 1 {
            cert.trace.push(format!("classify_1d: dimension {} is not 1", fam.dim()));
            return Verdict { status: Status::Inconclusive, rule: "none".into(), certificate: cert };
        }
        if let Some(w) = fam.known_witness() {
            cert.witness = Some(w.clone());
            return Self::verdict(
                Status::NotUniqueness,
                "Doetsch counterexample",
                cert,
                format!("known witness '{w}' annihilates the transform on the whole sequence"),
            );
        }
        if let Some(len) = fam.finite_len() {
            return Self::verdict(
                Status::NotUniqueness,
                "finite sequence",
                cert,
                format!("{len} points; a finite sequence is never a uniqueness sequence"),
            );
        }
        if let Some(v) = self.reduce_common(fam, |base| self.classify_1d(base, delta, theta)) {
            return v;
        }
        if let FamilyKind::ImaginaryPower { gamma } = fam.kind() {
            if gamma[0] > 0.5 {
                cert.paper_asserted = true;
                cert.assumptions.push(
                    "arg λ_k → π/2, so no sector bound θ < π/2 holds; the verdict is asserted for this family without that hypothesis"
                        .into(),
                );
                return Self::verdict(
                    Status::NotUniqueness,
                    "Example or(ii)",
                    cert,
                    format!("1 + i k^γ with γ = {} > 1/2", gamma[0]),
                );
            }
        }
        if let FamilyKind::Derived { base, derivation: Derivation::Subordinate { gammas, .. } } = fam.kind() {
            let base_verdict = self.classify_1d(base, None, None);
            let to_infinity = matches!(profile(base), Profile::Sector { angle, exponent, .. } if angle.abs() < FRAC_PI_2 && exponent > 0.0);
            let base_re_positive = self.evidence(base).is_some_and(|e| e.min_re > 0.0);
            if base_verdict.status == Status::Uniqueness && to_infinity && base_re_positive {
                let mut c = cert.clone();
                c.blaschke = blaschke_sum_classify(fam, self.blaschke_prefix).ok();
                c.assumptions.push(NO_ACCUMULATION.into());
                c.base = Some(Box::new(base_verdict));
                return Self::verdict(
                    Status::Uniqueness,
                    "Cor ojha",
                    c,
                    format!("base is a uniqueness sequence with Re λ_k → +∞; power γ = {}", gammas[0]),
                );
            }
        }
        let min_re = cert.min_re.unwrap_or(f64::NAN);
        let delta = delta.unwrap_or(min_re);
        if !(delta > 0.0 && min_re >= delta) {
            cert.trace.push(format!("Re λ_k ≥ δ > 0 fails on the prefix (min Re = {min_re}, δ = {delta})"));
            return Verdict { status: Status::Inconclusive, rule: "none".into(), certificate: cert };
        }
        let report = match blaschke_sum_classify(fam, self.blaschke_prefix) {
            Ok(r) => r,
            Err(e) => {
                cert.trace.push(format!("Blaschke test not applicable: {e}"));
                return Verdict { status: Status::Inconclusive, rule: "none".into(), certificate: cert };
            }
        };
        let outcome = report.outcome;
        let sector = match (&report.profile, theta) {
            (_, Some(t)) => Some(t),
            (Profile::Sector { angle, .. }, None) => Some(angle.abs().max(cert.max_abs_arg.unwrap_or(0.0))),
            _ => None,
        };
        cert.blaschke = Some(report);
        cert.assumptions.push(NO_ACCUMULATION.into());
        match outcome {
            BlaschkeOutcome::Divergent => Self::verdict(
                Status::Uniqueness,
                "Thm ibeer(i)",
                cert,
                format!("Re λ_k ≥ δ = {delta} and the Blaschke sum diverges"),
            ),
            BlaschkeOutcome::Convergent => match sector {
                Some(t) if t < FRAC_PI_2 && cert.max_abs_arg.is_some_and(|a| a <= t) => {
                    cert.assumptions
                        .push(format!("|arg λ_k| ≤ θ = {t} checked on the prefix and by the asymptotic direction"));
                    cert.trace.push(
                        "the Blaschke-product witness exists but its construction is outside this library".into(),
                    );
                    Self::verdict(
                        Status::NotUniqueness,
                        "Thm ibeer(iii)",
                        cert,
                        format!("Blaschke sum converges inside the sector |arg λ| ≤ {t}"),
                    )
                }
                _ => {
                    cert.trace.push("Blaschke sum converges but no sector bound θ < π/2 is available".into());
                    Verdict { status: Status::Inconclusive, rule: "none".into(), certificate: cert }
                }
            },
            BlaschkeOutcome::Unknown => {
                cert.trace.push("Blaschke sum undecided from finite data".into());
                Verdict { status: Status::Inconclusive, rule: "none".into(), certificate: cert }
            }
        }
    }

    /// Set-preserving reductions shared by both engines.
    fn reduce_common(&self, fam: &SequenceFamily, rec: impl Fn(&SequenceFamily) -> Verdict) -> Option<Verdict> {
        let FamilyKind::Derived { base, derivation } = fam.kind() else {
            return None;
        };
        match derivation {
            Derivation::Shift { z } => {
                let v = rec(base);
                Some(self.inherit(fam, v, format!("Prop nmt: status is invariant under the shift {z:?}")))
            }
            Derivation::Reindex { block } => {
                let v = rec(base);
                Some(self.inherit(fam, v, format!("Remark pot: block-{block} reversal only reorders the points")))
            }
            Derivation::ResidueSplit { m, r } => {
                let v = rec(base);
                if v.status == Status::NotUniqueness {
                    Some(self.inherit(
                        fam,
                        v,
                        format!("residue class {r} mod {m} is a subsequence of a non-uniqueness sequence"),
                    ))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Multidimensional rule engine. Falls back to the lattice-subset
    /// conditions when no structural rule applies.
    pub fn classify_nd(&self, fam: &SequenceFamily) -> Verdict {
        if fam.dim() == 1 {
            return self.classify_1d(fam, None, None);
        }
        let mut cert = self.certificate(fam);
        if let Some(w) = fam.known_witness() {
            cert.witness = Some(w.clone());
            return Self::verdict(Status::NotUniqueness, "Example oro", cert, format!("known witness '{w}'"));
        }
        if let Some(len) = fam.finite_len() {
            return Self::verdict(
                Status::NotUniqueness,
                "finite sequence",
                cert,
                format!("{len} points; a finite sequence is never a uniqueness sequence"),
            );
        }
        if let Some(v) = self.reduce_common(fam, |base| self.classify_nd(base)) {
            return v;
        }
        match fam.kind() {
            FamilyKind::AffineLattice { .. } => {
                return Self::verdict(
                    Status::Uniqueness,
                    "Prop gade(ii)",
                    cert,
                    "affine lattice a + kb, k ∈ ℕ₀ⁿ".into(),
                );
            }
            FamilyKind::ProductLattice { factors, .. } => return self.product(fam, factors, cert),
            FamilyKind::PowerLattice { gamma, .. } => {
                let bad: Vec<usize> = (0..gamma.len()).filter(|&j| gamma[j] > 1.0).collect();
                return if bad.is_empty() {
                    Self::verdict(Status::Uniqueness, "Example or(i)", cert, format!("all orders {gamma:?} are ≤ 1"))
                } else {
                    Self::verdict(Status::NotUniqueness, "Example or(i)", cert, format!("orders > 1 on axes {bad:?}"))
                };
            }
            FamilyKind::ImaginaryPower { gamma } => {
                let bad: Vec<usize> = (0..gamma.len()).filter(|&j| gamma[j] > 0.5).collect();
                return if bad.is_empty() {
                    Self::verdict(Status::Uniqueness, "Example or(ii)", cert, format!("all orders {gamma:?} are ≤ 1/2"))
                } else {
                    cert.paper_asserted = true;
                    cert.assumptions.push(
                        "arg λ_k → π/2 on the offending axes; verdict asserted for this family without a sector bound"
                            .into(),
                    );
                    Self::verdict(
                        Status::NotUniqueness,
                        "Example or(ii)",
                        cert,
                        format!("orders > 1/2 on axes {bad:?}"),
                    )
                };
            }
            FamilyKind::SectorLattice { theta } => {
                return Self::verdict(
                    Status::Uniqueness,
                    "Example oro",
                    cert,
                    format!("integer points with arg(k₁ + ik₂) ≤ {theta}"),
                );
            }
            FamilyKind::Derived { base, derivation: Derivation::Project { subset } } => {
                let v = self.classify_nd(base);
                let re_positive =
                    cert.min_re.is_some_and(|r| r > 0.0) && self.evidence(base).is_some_and(|e| e.min_re > 0.0);
                if v.status == Status::Uniqueness && re_positive {
                    let mut v =
                        self.inherit(fam, v, format!("Prop zxc: projection onto coordinates {:?}", subset.coords()));
                    v.rule = "Prop zxc".into();
                    v.certificate.witness = None;
                    return v;
                }
                cert.trace.push(format!("projection of a {:?} base gives no rule", v.status));
            }
            FamilyKind::Derived { derivation: Derivation::Subordinate { .. }, .. } => {
                cert.trace.push("multidimensional subordination: no rule beyond the one-dimensional corollary".into());
            }
            FamilyKind::Derived { derivation: Derivation::ResidueSplit { m, .. }, .. } => {
                cert.trace.push(format!(
                    "Prop split: some residue class mod {m} is a uniqueness sequence, not necessarily this one"
                ));
            }
            _ => {}
        }
        self.lattice_subset(fam, cert)
    }

    fn product(&self, fam: &SequenceFamily, factors: &[SequenceFamily], mut cert: Certificate) -> Verdict {
        let verdicts: Vec<Verdict> = factors.iter().map(|f| self.classify_1d(f, None, None)).collect();
        let re_positive = factors.iter().all(|f| self.evidence(f).is_some_and(|e| e.min_re > 0.0));
        let statuses: Vec<Status> = verdicts.iter().map(|v| v.status).collect();
        cert.factors = verdicts;
        if !re_positive {
            cert.trace.push("Thm tor needs Re λ > 0 on every factor; it fails on the prefix".into());
            return self.lattice_subset(fam, cert);
        }
        cert.assumptions.push("Re λ > 0 on every factor, checked on the prefix".into());
        if statuses.iter().all(|s| *s == Status::Uniqueness) {
            Self::verdict(Status::Uniqueness, "Thm tor", cert, "every factor is a uniqueness sequence".into())
        } else if let Some(j) = statuses.iter().position(|s| *s == Status::NotUniqueness) {
            Self::verdict(
                Status::NotUniqueness,
                "Thm tor",
                cert,
                format!("factor {} is not a uniqueness sequence", j + 1),
            )
        } else {
            cert.trace.push("Thm tor: some factor is undecided".into());
            self.lattice_subset(fam, cert)
        }
    }

    fn lattice_subset(&self, fam: &SequenceFamily, mut cert: Certificate) -> Verdict {
        match muntz_check(fam, None, self.muntz_prefix) {
            Ok(report) => {
                let pass = report.pass;
                cert.muntz = Some(report);
                if pass {
                    cert.assumptions.push("density condition judged from finite-prefix evidence".into());
                    Self::verdict(
                        Status::Uniqueness,
                        "Thm kunja",
                        cert,
                        "separation, density and Im constancy hold".into(),
                    )
                } else {
                    cert.trace.push("Thm kunja: conditions not met on the prefix".into());
                    Verdict { status: Status::Inconclusive, rule: "none".into(), certificate: cert }
                }
            }
            Err(e) => {
                cert.trace.push(format!("Thm kunja not applicable: {e}"));
                Verdict { status: Status::Inconclusive, rule: "none".into(), certificate: cert }
            }
        }
    }
}

pub fn classify_1d(fam: &SequenceFamily, delta: Option<f64>, theta: Option<f64>) -> Verdict {
    Classifier::default().classify_1d(fam, delta, theta)
}

pub fn classify_nd(fam: &SequenceFamily) -> Verdict {
    Classifier::default().classify_nd(fam)
}
