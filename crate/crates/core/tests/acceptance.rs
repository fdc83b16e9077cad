//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p uniqseq --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;
use uniqseq::counterexamples::{dech_witness, diagonal_witness, WitnessFunction, WitnessTransform};
use uniqseq::exact::{g_k, post_widder_inverse, GaussianRational, IndexSubset, PoleTerm, RationalTransform};
use uniqseq::harness::{random_exppoly, random_lambda, random_right_half_plane, random_subset};
use uniqseq::harness::{run_identity_suite, run_identity_suite_with_faults, Fault, SuiteSizes};
use uniqseq::numeric::{laplace_numeric, wright_eval, wright_moment, FunctionDescriptor, Subordinator, WrightParams};
use uniqseq::sequences::{
    blaschke_sum_classify, classify_nd, muntz_check, ocv_margin, subp_margin, BlaschkeOutcome, Point, SequenceFamily,
    Status,
};

type Outcome = Result<String, String>;
/// Name, check and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gi(n: i64) -> GaussianRational {
    GaussianRational::from_integer(n)
}

fn fam(s: &str) -> SequenceFamily {
    SequenceFamily::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn diagonal_exactness() -> Outcome {
    let f = g_k(2).tensor(&g_k(3)).checked_sub(&g_k(3).tensor(&g_k(2))).map_err(|e| e.to_string())?;
    let one = GaussianRational::one();
    let oracle = RationalTransform::new(
        2,
        vec![
            PoleTerm { coeff: one.clone(), poles: vec![gi(0), gi(0)], orders: vec![2, 3] },
            PoleTerm { coeff: gi(-1), poles: vec![gi(0), gi(0)], orders: vec![3, 2] },
        ],
    )
    .map_err(|e| e.to_string())?;
    let lf = f.laplace();
    ensure(lf.checked_sub(&oracle).map(|d| d.is_zero()).unwrap_or(false), || format!("transform {lf:?}"))?;
    let WitnessFunction::Exact(w) = diagonal_witness().function else { return Err("witness is not exact".into()) };
    ensure(w == f, || "diagonal witness differs from g₂⊗g₃ − g₃⊗g₂".into())?;

    // (λ₁−λ₂)/(λ₁³λ₂³) evaluated directly at Gaussian-rational points
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let l1 = GaussianRational::complex(rng.random_range(1..20), rng.random_range(-9..10));
        let l2 = GaussianRational::complex(rng.random_range(1..20), rng.random_range(-9..10));
        let num = &l1 + &l2.scale(&GaussianRational::parse_component("-1").unwrap());
        let den = &l1.powi(3).unwrap() * &l2.powi(3).unwrap();
        let direct = &num * &den.inv().unwrap();
        let got = lf.eval_exact(&[l1.clone(), l2.clone()]).map_err(|e| e.to_string())?;
        ensure(got == direct, || format!("mismatch at ({l1:?}, {l2:?})"))?;
    }
    for k in 1..=50 {
        let v = lf.eval_exact(&[gi(k), gi(k)]).map_err(|e| e.to_string())?;
        ensure(v.is_zero(), || format!("F({k},{k}) = {v:?}"))?;
    }
    Ok("exact identity; F(k,k) = 0 for k = 1..50".into())
}

fn doetsch() -> Outcome {
    let w = dech_witness();
    let Some(WitnessTransform::ClosedForm(closed)) = &w.transform else { return Err("no closed form".into()) };
    let desc = w.descriptor();
    let ks: Vec<i64> = std::iter::once(-1).chain((2..=20).flat_map(|k| [k, -k])).collect();
    let (mut closed_max, mut numeric_max): (f64, f64) = (0.0, 0.0);
    for &k in &ks {
        let lam = [c(0.0, k as f64)];
        closed_max = closed_max.max(closed(&lam).norm());
        let v = laplace_numeric(&desc, &lam, 1e-8).map_err(|e| e.to_string())?;
        numeric_max = numeric_max.max(v.value.norm());
    }
    let at_i = closed(&[c(0.0, 1.0)]);
    let at_i_num = laplace_numeric(&desc, &[c(0.0, 1.0)], 1e-8).map_err(|e| e.to_string())?.value;
    let err_i = (at_i - 2.0 * PI).norm();
    let err_i_num = (at_i_num - 2.0 * PI).norm();
    ensure(closed_max <= 1e-10 && err_i <= 1e-10, || {
        format!("closed form: max |f̂(ki)| = {closed_max:e}, |f̂(i) − 2π| = {err_i:e}")
    })?;
    ensure(numeric_max <= 1e-10 && err_i_num <= 1e-10, || {
        format!("numeric: max |f̂(ki)| = {numeric_max:e}, |f̂(i) − 2π| = {err_i_num:e}")
    })?;
    Ok(format!(
        "closed form max {closed_max:.1e}, |f̂(i)−2π| {err_i:.1e}; numeric (tol 1e-8) max {numeric_max:.1e}, |f̂(i)−2π| {err_i_num:.1e}"
    ))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm()
    }
}

fn floor_of(parts: &[(&RationalTransform, Option<&IndexSubset>)], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; dim];
    for (r, sub) in parts {
        for (i, a) in r.abscissa().into_iter().enumerate() {
            let j = sub.map_or(i, |s| s.coords()[i]);
            out[j] = out[j].max(a);
        }
    }
    out
}

fn partial_factorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = rng.random_range(1..=3);
        let subset = random_subset(&mut rng, n);
        let a = random_exppoly(&mut rng, subset.len(), 2);
        let u = random_exppoly(&mut rng, n, 2);
        let h = u.convolve_partial(&a, &subset).map_err(|e| e.to_string())?;
        let (la, lu, lh) = (a.laplace(), u.laplace(), h.laplace());
        let product = lu.mul_embedded(&la, &subset).map_err(|e| e.to_string())?;
        ensure(product == lh, || {
            format!("case {case}: exact paths differ for u = {} a = {}", u.to_text(), a.to_text())
        })?;
        let floor = floor_of(&[(&lu, None), (&la, Some(&subset))], n);
        for _ in 0..10 {
            let lam = random_lambda(&mut rng, &floor);
            let lam_s: Vec<Complex64> = subset.coords().iter().map(|&j| lam[j]).collect();
            let lhs = lh.eval(&lam).map_err(|e| e.to_string())?;
            let rhs = lu.eval(&lam).map_err(|e| e.to_string())? * la.eval(&lam_s).map_err(|e| e.to_string())?;
            worst = worst.max(rel(lhs, rhs));
        }
    }
    ensure(worst <= 1e-10, || format!("float relative deviation {worst:e}"))?;
    Ok(format!("100 pairs exact-equal; max relative float deviation {worst:.1e}"))
}

fn subordination() -> Outcome {
    let g = FunctionDescriptor::from_exppoly(&uniqseq::exact::ExpPolynomial::exponential(vec![gi(-1)]), 0.25);
    let sub = Arc::new(Subordinator::new(&[0.5]).map_err(|e| e.to_string())?);
    let desc = sub.descriptor(g, IndexSubset::full(1), 1e-7).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for lam in [1.0f64, 2.0, 4.0] {
        let v = laplace_numeric(&desc, &[c(lam, 0.0)], 1e-6).map_err(|e| e.to_string())?.value;
        let expected = lam.powf(-0.5) / (1.0 + lam.sqrt());
        worst = worst.max((v - expected).norm());
    }
    ensure(worst <= 1e-5, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} at λ ∈ {{1, 2, 4}}"))
}

fn wright() -> Outcome {
    let p = WrightParams::new(0.5).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let s = i as f64 * 0.1;
        let v = wright_eval(&p, s).map_err(|e| e.to_string())?;
        worst = worst.max((v - (-s * s / 4.0).exp() / PI.sqrt()).abs());
    }
    ensure(worst <= 1e-10, || format!("γ = 1/2 max error {worst:e}"))?;
    let mut moment_worst: f64 = 0.0;
    for g in [0.3, 0.5, 0.7] {
        for k in 0..=3u32 {
            let m = wright_moment(g, k, 1e-8).map_err(|e| e.to_string())?;
            let expected = gamma(k as f64 + 1.0) / gamma(g * k as f64 + 1.0);
            moment_worst = moment_worst.max((m - expected).abs());
        }
    }
    ensure(moment_worst <= 1e-6, || format!("moment error {moment_worst:e}"))?;
    Ok(format!("γ = 1/2 max error {worst:.1e}; moments max error {moment_worst:.1e}"))
}

fn subp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut min_margin = f64::INFINITY;
    for _ in 0..10_000 {
        let lam = random_right_half_plane(&mut rng);
        let g = rng.random_range(1e-6..1.0 - 1e-6);
        let m = subp_margin(lam, g).map_err(|e| e.to_string())?;
        let o = ocv_margin(lam, g).map_err(|e| e.to_string())?;
        // |(z−1)/(z+1)|² = (|z|² − 2Re z + 1)/(|z|² + 2Re z + 1)
        let q = |z: Complex64| ((z.norm_sqr() - 2.0 * z.re + 1.0) / (z.norm_sqr() + 2.0 * z.re + 1.0)).sqrt();
        let direct = q(lam) - q(lam.powf(g));
        ensure((direct - m).abs() <= 1e-12, || format!("margin {m} vs direct {direct} at λ = {lam}, γ = {g}"))?;
        ensure(m >= 0.0, || format!("negative margin {m} at λ = {lam}, γ = {g}"))?;
        if (lam - 1.0).norm() > 1e-6 {
            ensure(m > 0.0 && o > 0.0, || format!("margin {m}, ocv {o} at λ = {lam}, γ = {g}"))?;
        }
        min_margin = min_margin.min(m);
    }
    for g in [0.1, 0.5, 0.9] {
        let m = subp_margin(c(1.0, 0.0), g).map_err(|e| e.to_string())?;
        ensure(m.abs() <= 1e-6, || format!("margin {m} at λ = 1"))?;
    }
    Ok(format!("10⁴ samples nonnegative with matching ocv sign; min margin {min_margin:.1e}"))
}

fn blaschke_table() -> Outcome {
    let table = [
        ("affine:n=1;a=1;b=1", BlaschkeOutcome::Divergent),
        ("power:n=1;a=1;b=1;gamma=1", BlaschkeOutcome::Divergent),
        ("impow:n=1;gamma=0.5", BlaschkeOutcome::Divergent),
        ("impow:n=1;gamma=0.6", BlaschkeOutcome::Convergent),
    ];
    for (spec, expected) in table {
        let r = blaschke_sum_classify(&fam(spec), 2000).map_err(|e| e.to_string())?;
        ensure(r.outcome == expected, || format!("{spec}: {:?}, expected {expected:?}", r.outcome))?;
    }
    Ok("4 of 4 rows match".into())
}

fn classifier_golden() -> Outcome {
    let golden = [
        ("product:(affine:n=1;a=1;b=1)x(affine:n=1;a=1;b=1)", Status::Uniqueness, "Thm tor", None),
        ("affine:n=3;a=1,2,3;b=1,1,2", Status::Uniqueness, "Prop gade(ii)", None),
        ("explicit:diag-kk", Status::NotUniqueness, "Example oro", Some("diagonal")),
    ];
    for (spec, status, rule, witness) in golden {
        let v = classify_nd(&fam(spec));
        ensure(v.status == status && v.rule == rule && v.certificate.witness.as_deref() == witness, || {
            format!("{spec}: {:?} {} {:?}", v.status, v.rule, v.certificate.witness)
        })?;
    }
    let lattice =
        muntz_check(&fam("product:(affine:n=1;a=1;b=1)x(affine:n=1;a=1;b=1)"), None, 500).map_err(|e| e.to_string())?;
    ensure(lattice.pass && lattice.separation >= 1.0 && lattice.im_constant.iter().all(|c| c.constant), || {
        format!("full lattice: {lattice:?}")
    })?;
    // points (k₁,k₂) with (k₁−1)+(k₂−1) ≤ t number ⌊t+1⌋⌊t+2⌋/2
    for &(t, d) in &lattice.grid {
        let m = t.floor();
        let count = (m + 1.0) * (m + 2.0) / 2.0;
        ensure((d - count / (t * t)).abs() <= 1e-12, || format!("density {d} at t = {t}, counted {count}"))?;
    }
    let diag = muntz_check(&fam("explicit:diag-kk"), None, 500).map_err(|e| e.to_string())?;
    ensure(!diag.pass && !diag.density_positive, || format!("diagonal: {diag:?}"))?;
    let kik: Vec<Point> = (1..=50).map(|k| vec![c(k as f64, k as f64)]).collect();
    let moving = muntz_check(&SequenceFamily::finite("kik", kik).map_err(|e| e.to_string())?, None, 50)
        .map_err(|e| e.to_string())?;
    ensure(!moving.pass && !moving.im_constant[0].constant, || format!("k + ik: {moving:?}"))?;
    Ok("3 golden verdicts; Müntz lattice passes, diagonal fails (ii), k+ik fails (iii)".into())
}

fn post_widder() -> Outcome {
    let f = RationalTransform::new(1, vec![PoleTerm { coeff: gi(1), poles: vec![gi(-1)], orders: vec![1] }])
        .map_err(|e| e.to_string())?;
    let truth = (-1.0f64).exp();
    let err = |k| post_widder_inverse(&f, &[1.0], k).map(|v| (v - truth).norm()).map_err(|e| e.to_string());
    let (e10, e40) = (err(10)?, err(40)?);
    ensure(e40 < e10, || format!("error at k=40 {e40:e} not below k=10 {e10:e}"))?;
    let v10 = post_widder_inverse(&f, &[1.0], 10).map_err(|e| e.to_string())?;
    // (k/t)^{k+1}/(k/t+1)^{k+1}
    ensure((v10.re - (10.0f64 / 11.0).powi(11)).abs() <= 1e-14, || format!("f_10(1) = {v10}"))?;
    let inv = RationalTransform::inverse_lambdas(1);
    for k in 1..=20 {
        for t in [0.5, 1.0, 3.0] {
            let v = post_widder_inverse(&inv, &[t], k).map_err(|e| e.to_string())?;
            ensure(v == c(1.0, 0.0), || format!("1/λ gives {v} at k = {k}, t = {t}"))?;
        }
    }
    Ok(format!("error k=10 {e10:.3e} > k=40 {e40:.3e}; 1/λ inverts to exactly 1 for k ≤ 20"))
}

fn exact_vs_numeric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let tol = 1e-7;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=2);
        let f = random_exppoly(&mut rng, n, 2);
        let lf = f.laplace();
        let desc = FunctionDescriptor::from_exppoly(&f, 0.25);
        let floor = floor_of(&[(&lf, None)], n);
        for _ in 0..20 {
            let lam = random_lambda(&mut rng, &floor);
            let exact = lf.eval(&lam).map_err(|e| e.to_string())?;
            let v = laplace_numeric(&desc, &lam, tol).map_err(|e| format!("{e} for {}", f.to_text()))?;
            let d = (v.value - exact).norm();
            ensure(d <= tol, || format!("deviation {d:e} for {} at {lam:?}", f.to_text()))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("1000 evaluations, max deviation {worst:.1e}"))
}

fn negative_controls() -> Outcome {
    let seed = 7;
    let clean = run_identity_suite(seed, SuiteSizes::small());
    ensure(clean.iter().all(|r| r.pass), || {
        format!("clean suite fails: {:?}", clean.iter().filter(|r| !r.pass).map(|r| &r.id).collect::<Vec<_>>())
    })?;
    let mut caught = Vec::new();
    for fault in Fault::ALL {
        let failing: Vec<String> = run_identity_suite_with_faults(seed, SuiteSizes::small(), &[fault])
            .into_iter()
            .filter(|r| !r.pass)
            .map(|r| r.id)
            .collect();
        ensure(!failing.is_empty(), || format!("fault {} went undetected", fault.name()))?;
        caught.push(format!("{} → {}", fault.name(), failing.join(",")));
    }
    Ok(caught.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("diagonal witness exactness", diagonal_exactness, Some(1)),
        ("Doetsch counterexample", doetsch, Some(10)),
        ("partial convolution factorization", partial_factorization, Some(30)),
        ("subordination identity", subordination, Some(30)),
        ("Wright function", wright, Some(10)),
        ("subp inequality", subp, Some(5)),
        ("Blaschke classification table", blaschke_table, Some(1)),
        ("classifier golden verdicts", classifier_golden, Some(5)),
        ("Post-Widder convergence", post_widder, Some(5)),
        ("exact vs numeric oracle", exact_vs_numeric, Some(60)),
        ("harness negative controls", negative_controls, None),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > Duration::from_secs(b) => Err(format!("runtime {elapsed:.2?} over {b} s")),
            (o, _) => o,
        };
        let budget = budget.map_or(String::new(), |b| format!(" / {b} s"));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{elapsed:.2?}{budget}]: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name} [{elapsed:.2?}{budget}]: {detail}", i + 1);
            }
        }
    }
    println!("{} of 11 criteria pass", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
