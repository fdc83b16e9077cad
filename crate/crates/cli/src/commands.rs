use std::sync::Arc;

use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use uniqseq::counterexamples::{verify_annihilation_on, witness_by_id, WitnessTransform};
use uniqseq::exact::{GaussianRational, IndexSubset, RationalTransform};
use uniqseq::harness::{run_identity_suite_with_faults, Fault, SuiteSizes};
use uniqseq::numeric::{laplace_numeric, Subordinator};
use uniqseq::sequences::{Classifier, SequenceFamily, Verdict};

use crate::functions::{check_dims, parse_function, parse_points, parse_real_points, parse_transform, FunctionSpec};
use crate::output::{csv_bytes, fmt17, point_cells, point_header, Sink};
use crate::{Command, RunConfig};

pub fn run(cfg: &RunConfig) -> Result<bool> {
    let sink = Sink::new(cfg.out.as_deref())?;
    match &cfg.command {
        Command::Classify { delta, theta } => classify(cfg, &sink, *delta, *theta),
        Command::Witness { id } => witness(cfg, &sink, id),
        Command::Transform { function, numeric } => transform(cfg, &sink, function, *numeric),
        Command::Subordinate { function, gamma, subset, t } => subordinate(cfg, &sink, function, gamma, subset, t),
        Command::Invert { transform, t, k } => invert(&sink, transform, t, k),
        Command::Harness { sizes, fault } => harness(cfg, &sink, sizes, fault),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn classify(cfg: &RunConfig, sink: &Sink, delta: Option<f64>, theta: Option<f64>) -> Result<bool> {
    if cfg.family.is_empty() {
        bail!("classify needs at least one --family");
    }
    let families: Vec<SequenceFamily> =
        cfg.family.iter().map(|s| SequenceFamily::parse(s)).collect::<Result<_, _>>()?;
    let classifier = cfg.prefix.map(Classifier::with_prefix).unwrap_or_default();
    let verdicts: Vec<Verdict> = families
        .par_iter()
        .map(|f| if f.dim() == 1 { classifier.classify_1d(f, delta, theta) } else { classifier.classify_nd(f) })
        .collect();
    let mut lines = String::new();
    for v in &verdicts {
        lines.push_str(&v.to_json_line());
        lines.push('\n');
    }
    sink.primary("verdicts.jsonl", lines.as_bytes())?;

    let header: Vec<String> = [
        "index",
        "family",
        "status",
        "rule",
        "witness",
        "paper_asserted",
        "prefix",
        "min_re",
        "max_abs_arg",
        "min_pairwise_distance",
        "blaschke_outcome",
        "blaschke_term_exponent",
        "muntz_pass",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = verdicts
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let c = &v.certificate;
            vec![
                (i + 1).to_string(),
                c.family.clone(),
                format!("{:?}", v.status),
                v.rule.clone(),
                c.witness.clone().unwrap_or_default(),
                c.paper_asserted.to_string(),
                c.prefix.to_string(),
                opt(c.min_re),
                opt(c.max_abs_arg),
                opt(c.min_pairwise_distance),
                c.blaschke.as_ref().map(|b| format!("{:?}", b.outcome)).unwrap_or_default(),
                opt(c.blaschke.as_ref().and_then(|b| b.term_exponent)),
                c.muntz.as_ref().map(|m| m.pass.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    sink.auxiliary("certificates.csv", &csv_bytes(&header, &rows)?)?;
    for (i, v) in verdicts.iter().enumerate() {
        let c = &v.certificate;
        if let Some(b) = &c.blaschke {
            let rows: Vec<Vec<String>> = b.partial_sums.iter().map(|(n, s)| vec![n.to_string(), fmt17(*s)]).collect();
            sink.auxiliary(
                &format!("blaschke_{}.csv", i + 1),
                &csv_bytes(&["n".into(), "partial_sum".into()], &rows)?,
            )?;
        }
        if let Some(m) = &c.muntz {
            let rows: Vec<Vec<String>> = m.grid.iter().map(|(t, d)| vec![fmt17(*t), fmt17(*d)]).collect();
            sink.auxiliary(&format!("muntz_{}.csv", i + 1), &csv_bytes(&["t".into(), "density".into()], &rows)?)?;
        }
    }
    Ok(true)
}

fn witness(cfg: &RunConfig, sink: &Sink, id: &str) -> Result<bool> {
    let w = witness_by_id(id)?;
    let family = match cfg.family.first() {
        // a bare name such as "diag-kk" is shorthand for an explicit family
        Some(spec) => SequenceFamily::parse(spec)
            .or_else(|e| SequenceFamily::parse(&format!("explicit:{spec}")).map_err(|_| e))?,
        None => w.family.clone(),
    };
    let n = cfg.prefix.unwrap_or(50);
    let tol = cfg.tol.unwrap_or(1e-10);
    let report = verify_annihilation_on(&w, &family, n, tol)?;
    let probe = w.transform_at(&w.probe_point, tol)?;
    let record = json!({
        "witness": w.manifest(),
        "probe_abs": probe.norm(),
        "report": report,
    });
    sink.primary("witness.jsonl", format!("{record}\n").as_bytes())?;
    if let Some(text) = w.function_text() {
        sink.auxiliary("function.txt", text.as_bytes())?;
    }
    if let Some(WitnessTransform::Rational(r)) = &w.transform {
        sink.auxiliary("transform.txt", r.to_text().as_bytes())?;
    }
    let mut header = point_header("lambda", w.dim());
    header.extend(["value_re", "value_im", "abs_value"].map(String::from));
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .zip(&report.values)
        .map(|(p, v)| {
            let mut row = point_cells(p);
            row.extend([fmt17(v.re), fmt17(v.im), fmt17(v.norm())]);
            row
        })
        .collect();
    sink.auxiliary("annihilation.csv", &csv_bytes(&header, &rows)?)?;
    if !report.pass {
        eprintln!("witness '{}' does not vanish on {}: max |F| = {}", w.id, family.to_spec(), report.max_abs);
    }
    Ok(report.pass && probe.norm() > 1e-6)
}

struct Row {
    value: Complex64,
    abs_error: f64,
    method: &'static str,
    flag: String,
}

impl Row {
    fn flagged(method: &'static str, flag: String) -> Self {
        Row { value: Complex64::new(f64::NAN, f64::NAN), abs_error: f64::NAN, method, flag }
    }
}

fn in_region(r: &RationalTransform, p: &[Complex64]) -> bool {
    r.abscissa().iter().zip(p).all(|(a, z)| z.re > *a)
}

fn exact_row(r: &RationalTransform, p: &[Complex64]) -> Row {
    if !in_region(r, p) {
        return Row::flagged("exact", format!("outside the convergence region (abscissa {:?})", r.abscissa()));
    }
    let exact = p.iter().map(|z| GaussianRational::from_complex64(*z)).collect::<Result<Vec<_>, _>>();
    match exact.map_err(|e| e.to_string()).and_then(|l| r.eval_exact(&l).map_err(|e| e.to_string())) {
        Ok(v) => Row { value: v.to_complex64(), abs_error: 0.0, method: "exact", flag: String::new() },
        Err(e) => Row::flagged("exact", e),
    }
}

fn numeric_row(f: &FunctionSpec, p: &[Complex64], tol: f64) -> Row {
    match laplace_numeric(&f.descriptor(), p, tol) {
        Ok(v) if v.abs_error <= tol => {
            Row { value: v.value, abs_error: v.abs_error, method: "numeric", flag: String::new() }
        }
        Ok(v) => Row { value: v.value, abs_error: v.abs_error, method: "numeric", flag: "tolerance".into() },
        Err(e) => Row::flagged("numeric", e.to_string()),
    }
}

fn value_rows(mut header: Vec<String>, points: &[Vec<String>], rows: &[Row]) -> (Vec<String>, Vec<Vec<String>>) {
    header.extend(["value_re", "value_im", "abs_error", "method", "flag"].map(String::from));
    let body = points
        .iter()
        .zip(rows)
        .map(|(p, r)| {
            let mut cells = p.clone();
            cells.extend([
                fmt17(r.value.re),
                fmt17(r.value.im),
                fmt17(r.abs_error),
                r.method.to_string(),
                r.flag.clone(),
            ]);
            cells
        })
        .collect();
    (header, body)
}

fn transform(cfg: &RunConfig, sink: &Sink, function: &str, numeric: bool) -> Result<bool> {
    let f = parse_function(function)?;
    let points = parse_points(cfg.points.as_deref().ok_or_else(|| anyhow!("transform needs --points"))?)?;
    check_dims(&points, f.dim())?;
    let tol = cfg.tol.unwrap_or(1e-10);
    let rows: Vec<Row> = points
        .par_iter()
        .map(|p| match (&f, numeric) {
            (_, true) => numeric_row(&f, p, tol),
            (FunctionSpec::Exact(poly), false) => exact_row(&poly.laplace(), p),
            (FunctionSpec::Witness(w), false) => match &w.transform {
                Some(WitnessTransform::Rational(r)) => exact_row(r, p),
                Some(WitnessTransform::ClosedForm(g)) => {
                    let v = g(p);
                    // rounding in a handful of elementary operations
                    Row {
                        value: v,
                        abs_error: 64.0 * f64::EPSILON * (1.0 + v.norm()),
                        method: "closed-form",
                        flag: String::new(),
                    }
                }
                None => numeric_row(&f, p, tol),
            },
        })
        .collect();
    let cells: Vec<Vec<String>> = points.iter().map(|p| point_cells(p)).collect();
    let (header, body) = value_rows(point_header("lambda", f.dim()), &cells, &rows);
    sink.primary("transform.csv", &csv_bytes(&header, &body)?)?;
    Ok(rows.iter().all(|r| r.flag.is_empty()))
}

fn subordinate(
    cfg: &RunConfig,
    sink: &Sink,
    function: &str,
    gammas: &[f64],
    subset: &[usize],
    times: &Option<String>,
) -> Result<bool> {
    let f = parse_function(function)?;
    let dim = f.dim();
    let coords: Vec<usize> = if subset.is_empty() { (1..=gammas.len()).collect() } else { subset.to_vec() };
    if coords.len() != gammas.len() {
        bail!("--subset has {} coordinates but --gamma has {} orders", coords.len(), gammas.len());
    }
    let subset = IndexSubset::from_one_based(&coords, dim)?;
    let tol = cfg.tol.unwrap_or(1e-6);
    let sub = Arc::new(Subordinator::new(gammas)?);
    let base = f.descriptor();
    match (times, &cfg.points) {
        (Some(ts), None) => {
            let ts = parse_real_points(ts)?;
            check_dims(&ts, dim)?;
            let rows: Vec<Row> = ts
                .par_iter()
                .map(|t| match sub.eval(&base, &subset, t, tol) {
                    Ok(v) if v.abs_error <= tol => {
                        Row { value: v.value, abs_error: v.abs_error, method: "numeric", flag: String::new() }
                    }
                    Ok(v) => {
                        Row { value: v.value, abs_error: v.abs_error, method: "numeric", flag: "tolerance".into() }
                    }
                    Err(e) => Row::flagged("numeric", e.to_string()),
                })
                .collect();
            let cells: Vec<Vec<String>> = ts.iter().map(|t| t.iter().map(|x| fmt17(*x)).collect()).collect();
            let (header, body) = value_rows((1..=dim).map(|j| format!("t{j}")).collect(), &cells, &rows);
            sink.primary("subordinate.csv", &csv_bytes(&header, &body)?)?;
            Ok(rows.iter().all(|r| r.flag.is_empty()))
        }
        (None, Some(ps)) => {
            let points = parse_points(ps)?;
            check_dims(&points, dim)?;
            let reference: Option<RationalTransform> = match &f {
                FunctionSpec::Exact(p) => Some(p.laplace()),
                FunctionSpec::Witness(w) => match &w.transform {
                    Some(WitnessTransform::Rational(r)) => Some(r.clone()),
                    _ => None,
                },
            };
            let desc = Arc::clone(&sub).descriptor(base, subset.clone(), tol * 0.01)?;
            let rows: Vec<(Row, Option<f64>)> = points
                .par_iter()
                .map(|lam| {
                    let mut row = match laplace_numeric(&desc, lam, tol * 0.1) {
                        Ok(v) => Row { value: v.value, abs_error: v.abs_error, method: "numeric", flag: String::new() },
                        Err(e) => Row::flagged("numeric", e.to_string()),
                    };
                    // λ^{γ−1} Ĝ(λ^γ) in the subordinated coordinates
                    let expected = reference.as_ref().and_then(|r| {
                        let mut inner = lam.clone();
                        let mut factor = Complex64::new(1.0, 0.0);
                        for (&j, &g) in subset.coords().iter().zip(gammas) {
                            inner[j] = lam[j].powf(g);
                            factor *= lam[j].powf(g - 1.0);
                        }
                        r.eval(&inner).ok().map(|v| v * factor)
                    });
                    let dev = expected.map(|e| (row.value - e).norm());
                    if row.flag.is_empty() && dev.is_some_and(|d| d.is_nan() || d > tol) {
                        row.flag = "identity".into();
                    }
                    (row, dev)
                })
                .collect();
            let cells: Vec<Vec<String>> = points.iter().map(|p| point_cells(p)).collect();
            let (only_rows, devs): (Vec<Row>, Vec<Option<f64>>) = rows.into_iter().unzip();
            let (mut header, mut body) = value_rows(point_header("lambda", dim), &cells, &only_rows);
            header.push("identity_error".into());
            for (line, d) in body.iter_mut().zip(&devs) {
                line.push(opt(*d));
            }
            sink.primary("subordinate.csv", &csv_bytes(&header, &body)?)?;
            Ok(only_rows.iter().all(|r| r.flag.is_empty()))
        }
        _ => bail!("subordinate needs exactly one of --t or --points"),
    }
}

fn invert(sink: &Sink, transform: &str, times: &str, ks: &[u32]) -> Result<bool> {
    let r = parse_transform(transform)?;
    let f = r.inverse();
    let ts = parse_real_points(times)?;
    check_dims(&ts, r.dim())?;
    let jobs: Vec<(&Vec<f64>, u32)> = ts.iter().flat_map(|t| ks.iter().map(move |&k| (t, k))).collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(t, k)| match uniqseq::exact::post_widder_inverse(&r, t, k) {
            Ok(v) => {
                let truth = f.eval(t).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                Row { value: v, abs_error: (v - truth).norm(), method: "post-widder", flag: String::new() }
            }
            Err(e) => Row::flagged("post-widder", e.to_string()),
        })
        .collect();
    let mut header: Vec<String> = (1..=r.dim()).map(|j| format!("t{j}")).collect();
    header.push("k".into());
    header.extend(["value_re", "value_im", "abs_error", "method", "flag"].map(String::from));
    let body: Vec<Vec<String>> = jobs
        .iter()
        .zip(&rows)
        .map(|(&(t, k), row)| {
            let mut cells: Vec<String> = t.iter().map(|x| fmt17(*x)).collect();
            cells.push(k.to_string());
            cells.extend([
                fmt17(row.value.re),
                fmt17(row.value.im),
                fmt17(row.abs_error),
                row.method.into(),
                row.flag.clone(),
            ]);
            cells
        })
        .collect();
    sink.primary("invert.csv", &csv_bytes(&header, &body)?)?;
    Ok(rows.iter().all(|r| r.flag.is_empty()))
}

fn harness(cfg: &RunConfig, sink: &Sink, sizes: &str, faults: &[String]) -> Result<bool> {
    let sizes =
        SuiteSizes::by_name(sizes).ok_or_else(|| anyhow!("unknown sizes '{sizes}' (expected small or full)"))?;
    let faults: Vec<Fault> =
        faults.iter().map(|f| f.parse::<Fault>().map_err(|e| anyhow!(e))).collect::<Result<_>>()?;
    let reports = run_identity_suite_with_faults(cfg.seed.unwrap_or(42), sizes, &faults);
    let mut lines = String::new();
    for r in &reports {
        lines.push_str(&r.to_json_line());
        lines.push('\n');
    }
    sink.primary("reports.jsonl", lines.as_bytes())?;
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!(
            "property {} failed: {} of {} instances, max deviation {}",
            r.id, r.failed, r.instances, r.max_deviation
        );
    }
    Ok(reports.iter().all(|r| r.pass))
}
