use std::process::{Command, Output};

fn uniqseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniqseq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| header.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

#[test]
fn classify_golden_verdicts() {
    let o = uniqseq(&[
        "classify",
        "--family",
        "product:(affine:n=1;a=1;b=1)x(affine:n=1;a=1;b=1)",
        "--family",
        "explicit:diag-kk",
        "--family",
        "impow:n=1;gamma=0.9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["status"], "Uniqueness");
    assert_eq!(lines[0]["rule"], "Thm tor");
    assert_eq!(lines[1]["status"], "NotUniqueness");
    assert_eq!(lines[1]["certificate"]["witness"], "diagonal");
    assert_eq!(lines[2]["status"], "NotUniqueness");
    assert_eq!(lines[2]["rule"], "Example or(ii)");
}

#[test]
fn classify_parse_error_exits_2() {
    let o = uniqseq(&["classify", "--family", "affine:n=2;a=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(uniqseq(&["classify", "--bogus"]).status.code(), Some(2));
}

#[test]
fn witness_checks_and_negative_control() {
    let o = uniqseq(&["witness", "diagonal"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["report"]["max_abs"], 0.0);
    assert_eq!(v["report"]["n"], 50);

    let o = uniqseq(&["witness", "dech", "--prefix", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["report"]["max_abs"].as_f64().unwrap() <= 1e-10);

    assert_eq!(uniqseq(&["witness", "ray:c=2", "--family", "diag-kk"]).status.code(), Some(1));
    assert_eq!(uniqseq(&["witness", "nope"]).status.code(), Some(2));
}

#[test]
fn witness_writes_files_under_out() {
    let dir = std::env::temp_dir().join(format!("uniqseq-witness-{}", std::process::id()));
    let o = uniqseq(&["witness", "ray:c=2", "--prefix", "10", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    for f in ["witness.jsonl", "function.txt", "transform.txt", "annihilation.csv"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
    let rows = csv_rows(&std::fs::read_to_string(dir.join("annihilation.csv")).unwrap());
    assert_eq!(rows.len(), 10);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn transform_of_the_diagonal_witness() {
    let o = uniqseq(&["transform", "--function", "witness:diagonal", "--points", "2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0]["method"], "exact");
    assert_eq!(rows[0]["value_re"].parse::<f64>().unwrap(), -1.0 / 216.0);
    assert_eq!(rows[0]["value_im"], "0");
}

#[test]
fn transform_numeric_agrees_and_region_is_flagged() {
    let o = uniqseq(&["transform", "--function", "exp:-1", "--points", "1;2+1i", "--numeric", "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    for (row, lam) in csv_rows(&stdout(&o)).iter().zip([(1.0, 0.0), (2.0, 1.0)]) {
        let exact = num_complex::Complex64::new(1.0, 0.0) / num_complex::Complex64::new(lam.0 + 1.0, lam.1);
        let v = num_complex::Complex64::new(row["value_re"].parse().unwrap(), row["value_im"].parse().unwrap());
        let err: f64 = row["abs_error"].parse().unwrap();
        assert_eq!(row["method"], "numeric");
        assert!(err <= 1e-9);
        assert!((v - exact).norm() <= 1e-9);
    }
    let o = uniqseq(&["transform", "--function", "exp:1", "--points", "0.5;3"]);
    assert_eq!(o.status.code(), Some(1));
    let rows = csv_rows(&stdout(&o));
    assert!(!rows[0]["flag"].is_empty());
    assert!(rows[1]["flag"].is_empty());
}

#[test]
fn subordinate_identity_at_four() {
    let o = uniqseq(&["subordinate", "--function", "exp:-1", "--gamma", "0.5", "--points", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let v: f64 = rows[0]["value_re"].parse().unwrap();
    assert!((v - 1.0 / 6.0).abs() <= 1e-5);
    assert!(rows[0]["identity_error"].parse::<f64>().unwrap() <= 1e-6);
}

#[test]
fn invert_first_order_pole() {
    let o = uniqseq(&["invert", "--transform", "pole:1@-1^1", "--t", "1", "--k", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let v: f64 = rows[0]["value_re"].parse().unwrap();
    // (k/t)^{k+1} / (k/t + 1)^{k+1} at k = 10, t = 1
    let closed = (10.0f64 / 11.0).powi(11);
    assert!((v - closed).abs() < 1e-13);
    assert!((v - 0.350494).abs() < 1e-6);
    assert_eq!(rows[0]["method"], "post-widder");
}

#[test]
fn output_is_byte_stable() {
    let runs = [
        vec!["classify", "--family", "impow:n=1;gamma=0.3", "--family", "sector:theta=0.5"],
        vec!["transform", "--function", "g:2", "--points", "1.5;2+0.5i", "--numeric"],
        vec!["harness", "--seed", "3"],
    ];
    for args in runs {
        let a = uniqseq(&args);
        let b = uniqseq(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn harness_reports_injected_faults() {
    let o = uniqseq(&["harness", "--seed", "7", "--fault", "wrong-family"]);
    assert_eq!(o.status.code(), Some(1));
    let failed: Vec<String> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["pass"] == false)
        .map(|v| v["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failed, ["witness-annihilation"]);
    assert_eq!(uniqseq(&["harness", "--fault", "nonsense"]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("uniqseq-conf-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "family = explicit:diag-kk\nprefix = 30\n").unwrap();
    let o = uniqseq(&["classify", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["certificate"]["prefix"], 30);
    std::fs::remove_dir_all(dir).unwrap();
}
