use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn oscmax(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscmax"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const SPIRAL_CONFIG: &str = r#"{
  "curve": {"kind": "log_spiral", "delta": 1.0, "depth": {"kind": "per_decade", "samples": 128}},
  "exponent": {"kind": "constant", "p": 2.0},
  "gamma": [0.0, 0.0],
  "levels": [256, 512, 1024],
  "seed": 3
}"#;

#[test]
fn gen_curve_then_indices() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let v = ok(&oscmax(&["--out", "c", "gen-curve", "--kind", "spiral", "--delta", "0.5", "--n", "2048"], d));
    assert_eq!(v["nodes"], 2048);
    let v = ok(&oscmax(&["--curve", "c/curve.json", "--out", "r", "indices"], d));
    let a = v["indices"]["alpha"].as_f64().unwrap();
    let b = v["indices"]["beta"].as_f64().unwrap();
    assert!((a - 0.5).abs() < 1e-6 && (b - 0.5).abs() < 1e-6);
    let csv = fs::read_to_string(d.join("r/submult.csv")).unwrap();
    assert!(csv.starts_with("x,rho,log_x,log_rho\n"));
}

#[test]
fn polyline_corner_has_zero_indices() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&oscmax(
        &[
            "gen-curve", "--kind", "polyline", "--vertices", "0,0;1,0;0,1", "--closed", "--marked", "0", "--n", "2048",
        ],
        d,
    ));
    let v = ok(&oscmax(&["--curve", "curve.json", "indices"], d));
    assert!(v["indices"]["alpha"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn verdict_without_curve() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(&oscmax(
        &["verdict", "--p", "2", "--gamma", "0.2,0.1", "--alpha", "-1", "--beta", "1"],
        dir.path(),
    ));
    assert_eq!(v["classification"], "MAIN_THM_BOUNDED");
    let v = ok(&oscmax(
        &["verdict", "--p", "2", "--gamma", "0,1", "--alpha", "-1", "--beta", "1"],
        dir.path(),
    ));
    assert_eq!(v["classification"], "NECESSARY_VIOLATED");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(oscmax(&["verdict", "--p", "0.5", "--alpha", "0", "--beta", "0"], d).status.code(), Some(2));
    assert_eq!(oscmax(&["--curve", "absent.json", "indices"], d).status.code(), Some(2));
    assert_eq!(oscmax(&["indices"], d).status.code(), Some(2));
    // a spiral too shallow for the default three-decade grid
    ok(&oscmax(&["gen-curve", "--kind", "spiral", "--r-min", "0.1", "--n", "256"], d));
    assert_eq!(oscmax(&["--curve", "curve.json", "indices"], d).status.code(), Some(3));
    // p must exceed 1
    assert_eq!(
        oscmax(&["--curve", "curve.json", "norm", "--p", "1.0"], d).status.code(),
        Some(2)
    );
}

#[test]
fn norm_and_maximal_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&oscmax(&["gen-curve", "--kind", "circle", "--n", "512", "--decades", "0"], d));
    // ‖1‖ on a curve of length 2π with p = 2 is sqrt(2π)
    let v = ok(&oscmax(&["--curve", "curve.json", "norm", "--p", "2"], d));
    let n = v["norm"].as_f64().unwrap();
    assert_eq!(v["p_min"].as_f64().unwrap(), 2.0);
    assert!((n - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-3, "{n}");
    let v = ok(&oscmax(&["--curve", "curve.json", "maximal"], d));
    assert!(v["max_log"].as_f64().unwrap().abs() < 1e-12);
    let csv = fs::read_to_string(d.join("maximal.csv")).unwrap();
    assert_eq!(csv.lines().count(), 513);
}

#[test]
fn function_csv_must_match_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&oscmax(&["gen-curve", "--kind", "circle", "--n", "64", "--decades", "0"], d));
    fs::write(d.join("f.csv"), "value\n1\n2\n").unwrap();
    let out = oscmax(&["--curve", "curve.json", "norm", "--function", "f.csv"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("cfg.json"), SPIRAL_CONFIG).unwrap();
    let v = ok(&oscmax(&["probe", "--config", "cfg.json"], d));
    assert_eq!(v["ratios"].as_array().unwrap().len(), 3);
    assert_eq!(v["classification"], "MAIN_THM_BOUNDED");
    assert!(d.join("probe.csv").exists() && d.join("probe.json").exists());
}

#[test]
fn sweep_is_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("cfg.json"), SPIRAL_CONFIG).unwrap();
    let args = |out: &'static str| {
        [
            "--out", out, "--seed", "11", "--levels", "256,512,1024", "sweep", "--config", "cfg.json", "--re", "-0.2,0.2",
            "--im", "0,0.2", "--step", "0.2",
        ]
    };
    let v = ok(&oscmax(&args("a"), d));
    assert_eq!(v["rows"], 6);
    ok(&oscmax(&args("b"), d));
    let a = fs::read(d.join("a/sweep.csv")).unwrap();
    let b = fs::read(d.join("b/sweep.csv")).unwrap();
    assert_eq!(a, b);
    let mut seq = args("c").to_vec();
    seq.insert(0, "--sequential");
    ok(&oscmax(&seq, d));
    assert_eq!(a, fs::read(d.join("c/sweep.csv")).unwrap());
}
