//! Property suites over the whole library, with seeded negative controls.
//!
//! Every property owns an RNG stream derived from the suite seed and its
//! position in the catalogue, so reports are reproducible and properties can
//! run concurrently.

mod faults;
mod properties;
pub mod random;
mod totality;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use faults::Fault;
pub use random::{random_exppoly, random_lambda, random_right_half_plane, random_subset};
pub use totality::{check_totality_conditions, TotalityConditions};

use faults::Kernels;
use properties::{Ctx, PropertyFn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub id: String,
    pub module: String,
    pub instances: usize,
    pub failed: usize,
    /// Largest deviation over all instances; non-finite values are stored as
    /// infinity.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    /// ChaCha8 stream index of this property under `seed`.
    pub stream: u64,
    /// Finite evidence for an infinite statement, not a check of it.
    pub evidence_only: bool,
    /// Serialized offending instances, at most eight.
    pub failures: Vec<serde_json::Value>,
    pub note: String,
}

impl PropertyReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSizes {
    /// Random instances for the exact-arithmetic properties.
    pub exact: usize,
    pub numeric_functions: usize,
    pub numeric_points: usize,
    pub subordination: usize,
    pub isometry: usize,
    /// Random samples for the pointwise inequalities.
    pub samples: usize,
    /// Random derivations per family in the sequence properties.
    pub shifts: usize,
    pub rays: usize,
    pub ray_points: usize,
    pub evidence: usize,
}

impl SuiteSizes {
    pub fn small() -> Self {
        SuiteSizes {
            exact: 20,
            numeric_functions: 4,
            numeric_points: 3,
            subordination: 1,
            isometry: 3,
            samples: 1000,
            shifts: 2,
            rays: 2,
            ray_points: 2,
            evidence: 4,
        }
    }

    pub fn full() -> Self {
        SuiteSizes {
            exact: 100,
            numeric_functions: 50,
            numeric_points: 20,
            subordination: 3,
            isometry: 10,
            samples: 10_000,
            shifts: 5,
            rays: 4,
            ray_points: 5,
            evidence: 10,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "small" => Some(Self::small()),
            "full" => Some(Self::full()),
            _ => None,
        }
    }
}

const CATALOGUE: &[PropertyFn] = &[
    properties::conv_homomorphism,
    properties::partial_conv_factorization,
    properties::conv_algebra,
    properties::antiderivative_round_trip,
    properties::post_widder_monotone,
    properties::exact_vs_numeric,
    properties::wright_moments,
    properties::wright_half_order,
    properties::subordination_identity,
    properties::isometry_preserves_norm,
    properties::shift_coherence,
    properties::reindex_invariance,
    properties::projection_keeps_uniqueness,
    properties::blaschke_positivity,
    properties::subp_inequality,
    properties::subordination_corollary,
    properties::residue_split_partition,
    properties::witness_annihilation,
    properties::witness_nonzero,
    properties::ray_factorization,
    properties::totality_conditions,
    properties::total_forward_evidence,
];

/// Runs every property, sorted by id in the output.
pub fn run_identity_suite(seed: u64, sizes: SuiteSizes) -> Vec<PropertyReport> {
    run_identity_suite_with_faults(seed, sizes, &[])
}

/// As [`run_identity_suite`] with the given faults injected into the
/// kernels the properties call.
pub fn run_identity_suite_with_faults(seed: u64, sizes: SuiteSizes, faults: &[Fault]) -> Vec<PropertyReport> {
    let kernels = Kernels::with_faults(faults);
    let mut reports: Vec<PropertyReport> = CATALOGUE
        .par_iter()
        .enumerate()
        .map(|(i, prop)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut ctx = Ctx { rng, sizes, kernels, seed, stream: i as u64 };
            prop(&mut ctx)
        })
        .collect();
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    reports
}
