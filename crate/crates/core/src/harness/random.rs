//! Seeded generators for property instances.

use num_complex::Complex64;
use rand::Rng;

use crate::exact::{ExpMonomial, ExpPolynomial, GaussianRational, IndexSubset};

fn small_gaussian<R: Rng>(rng: &mut R) -> GaussianRational {
    loop {
        let (a, b) = (rng.random_range(-5i64..=5), rng.random_range(-5i64..=5));
        if a != 0 || b != 0 {
            let den = rng.random_range(1i64..=4);
            return &GaussianRational::complex(a, b) * &GaussianRational::ratio(1, den);
        }
    }
}

/// Rates with `Re ∈ {−2, −1.5, …, 0}` and `Im ∈ {−1, −1/2, …, 1}`.
fn stable_rate<R: Rng>(rng: &mut R) -> GaussianRational {
    let re = -rng.random_range(0i64..=4);
    let im = rng.random_range(-2i64..=2);
    &GaussianRational::complex(re, im) * &GaussianRational::ratio(1, 2)
}

/// Exp-polynomial with `1..=max_terms` terms, powers up to 2 and rates in
/// the closed left half plane.
pub fn random_exppoly<R: Rng>(rng: &mut R, dim: usize, max_terms: usize) -> ExpPolynomial {
    let count = rng.random_range(1..=max_terms.max(1));
    let terms = (0..count)
        .map(|_| ExpMonomial {
            coeff: small_gaussian(rng),
            powers: (0..dim).map(|_| rng.random_range(0u32..=2)).collect(),
            rates: (0..dim).map(|_| stable_rate(rng)).collect(),
        })
        .collect();
    let p = ExpPolynomial::new(dim, terms).expect("consistent dimensions");
    if p.is_zero() {
        ExpPolynomial::exponential(vec![GaussianRational::from_integer(-1); dim])
    } else {
        p
    }
}

pub fn random_subset<R: Rng>(rng: &mut R, dim: usize) -> IndexSubset {
    loop {
        let coords: Vec<usize> = (0..dim).filter(|_| rng.random_bool(0.5)).collect();
        if !coords.is_empty() {
            return IndexSubset::new(coords, dim).expect("in range");
        }
    }
}

/// Point with `Re λ_j ∈ [floor_j + 0.5, floor_j + 3]` and `|Im λ_j| ≤ 3`.
pub fn random_lambda<R: Rng>(rng: &mut R, floor: &[f64]) -> Vec<Complex64> {
    floor.iter().map(|f| Complex64::new(f.max(0.0) + rng.random_range(0.5..3.0), rng.random_range(-3.0..3.0))).collect()
}

/// `λ = r e^{iφ}` with `r` log-uniform on `[1e−3, 1e3]` and `|φ| < π/2`.
pub fn random_right_half_plane<R: Rng>(rng: &mut R) -> Complex64 {
    let r = 10f64.powf(rng.random_range(-3.0..3.0));
    let phi = rng.random_range(-1.0..1.0) * (std::f64::consts::FRAC_PI_2 - 1e-9);
    Complex64::from_polar(r, phi)
}
