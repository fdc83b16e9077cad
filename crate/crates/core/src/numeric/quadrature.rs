//! Composite Gauss–Legendre rules on panels, tensorized over boxes.

use std::collections::BinaryHeap;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

/// Nodes per panel.
pub const NODES_PER_PANEL: usize = 10;

fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NonZeroUsize::new(NODES_PER_PANEL).expect("nonzero");
        GaussLegendre::new(n).as_node_weight_pairs().to_vec()
    })
}

fn push_panel(lo: f64, hi: f64, out: &mut Vec<(f64, f64)>) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for &(x, w) in reference_rule() {
        out.push((mid + half * x, half * w));
    }
}

/// Nodes and weights for `panels` uniform panels on `[lo, hi]`, with the first
/// panel further split dyadically `grade` times toward `lo` (for integrands
/// with a mild singularity at the left endpoint).
pub fn axis_rule(lo: f64, hi: f64, panels: usize, grade: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity((panels + grade) * NODES_PER_PANEL);
    // graded pieces of the first panel: [lo, lo+h/2^g], [lo+h/2^g, lo+h/2^{g-1}], ...
    let mut left = lo;
    for g in (0..grade).rev() {
        let right = lo + h / (1u64 << (g + 1)) as f64;
        push_panel(left, right, &mut out);
        left = right;
    }
    push_panel(left, lo + h, &mut out);
    for p in 1..panels {
        push_panel(lo + p as f64 * h, lo + (p + 1) as f64 * h, &mut out);
    }
    out
}

/// Tensor-product quadrature of `f` over the axis rules.
pub fn tensor_integrate<F>(f: &F, axes: &[Vec<(f64, f64)>]) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync + ?Sized,
{
    let n = axes.len();
    assert!(n >= 1, "at least one axis");
    let total: usize = axes.iter().map(Vec::len).product();
    let inner = |&(x0, w0): &(f64, f64)| -> Complex64 {
        let mut point = vec![0.0; n];
        point[0] = x0;
        if n == 1 {
            return f(&point) * w0;
        }
        let mut idx = vec![0usize; n];
        let mut acc = Complex64::new(0.0, 0.0);
        loop {
            let mut w = w0;
            for j in 1..n {
                let (x, wj) = axes[j][idx[j]];
                point[j] = x;
                w *= wj;
            }
            acc += f(&point) * w;
            let mut j = n - 1;
            loop {
                idx[j] += 1;
                if idx[j] < axes[j].len() {
                    break;
                }
                idx[j] = 0;
                if j == 1 {
                    return acc;
                }
                j -= 1;
            }
        }
    };
    if total >= 4096 {
        // collect first so the summation order does not depend on scheduling
        let parts: Vec<Complex64> = axes[0].par_iter().map(inner).collect();
        parts.into_iter().sum()
    } else {
        axes[0].iter().map(inner).sum()
    }
}

/// Outcome of an adaptive box integration.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxQuadrature {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels: Vec<usize>,
}

/// Integrates `f` over `∏ [0, upper_j]`, doubling the panel count on every
/// axis until two successive levels differ by at most `tol`. With
/// `grade_per_level > 0` the first panel of each axis is additionally split
/// toward the origin that many times per level.
///
/// Returns `Err(best)` when `max_nodes` would be exceeded first.
pub fn adaptive_box<F>(
    f: &F,
    upper: &[f64],
    start_panels: &[usize],
    grade_per_level: usize,
    tol: f64,
    max_nodes: usize,
) -> Result<BoxQuadrature, BoxQuadrature>
where
    F: Fn(&[f64]) -> Complex64 + Sync + ?Sized,
{
    let build = |level: usize| -> (Vec<Vec<(f64, f64)>>, Vec<usize>) {
        let panels: Vec<usize> = start_panels.iter().map(|&p| p.max(1) << level).collect();
        let axes = upper.iter().zip(&panels).map(|(&hi, &p)| axis_rule(0.0, hi, p, grade_per_level * level)).collect();
        (axes, panels)
    };
    let (axes, panels) = build(0);
    if axes.iter().map(Vec::len).product::<usize>() > max_nodes {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        return Err(BoxQuadrature { value: nan, error_estimate: f64::INFINITY, panels });
    }
    let mut prev = tensor_integrate(f, &axes);
    let mut best = BoxQuadrature { value: prev, error_estimate: f64::INFINITY, panels };
    for level in 1.. {
        let (axes, panels) = build(level);
        let nodes: usize = axes.iter().map(Vec::len).product();
        if nodes > max_nodes {
            return Err(best);
        }
        let cur = tensor_integrate(f, &axes);
        let err = (cur - prev).norm();
        best = BoxQuadrature { value: cur, error_estimate: err, panels };
        if err <= tol {
            return Ok(best);
        }
        prev = cur;
    }
    unreachable!()
}

/// Globally adaptive 1-D Gauss–Legendre quadrature of a real integrand,
/// starting from `pieces` equal subintervals and always bisecting the
/// interval with the largest local error estimate. Stops when the summed
/// estimate is within `max(abs_tol, rel_tol·|value|)` or after
/// `MAX_INTERVALS_1D` intervals; returns `(value, error_estimate)`.
pub fn adaptive_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, abs_tol: f64, rel_tol: f64) -> (f64, f64) {
    struct Piece {
        lo: f64,
        hi: f64,
        value: f64,
        err: f64,
    }
    impl PartialEq for Piece {
        fn eq(&self, other: &Self) -> bool {
            self.err == other.err
        }
    }
    impl Eq for Piece {}
    impl PartialOrd for Piece {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Piece {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.err.total_cmp(&other.err)
        }
    }
    let panel = |lo: f64, hi: f64| -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (lo + hi);
        reference_rule().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    };
    let make = |lo: f64, hi: f64| -> Piece {
        let mid = 0.5 * (lo + hi);
        let whole = panel(lo, hi);
        let value = panel(lo, mid) + panel(mid, hi);
        Piece { lo, hi, value, err: (value - whole).abs() }
    };
    let pieces = pieces.max(1);
    let h = (b - a) / pieces as f64;
    let mut heap: BinaryHeap<Piece> = (0..pieces)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == pieces { b } else { lo + h };
            make(lo, hi)
        })
        .collect();
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= abs_tol.max(rel_tol * value.abs()) || heap.len() >= MAX_INTERVALS_1D {
            return (value, err);
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(make(worst.lo, mid));
        heap.push(make(mid, worst.hi));
    }
}

/// Interval cap for [`adaptive_1d`].
pub const MAX_INTERVALS_1D: usize = 2000;
