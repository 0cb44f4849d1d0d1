use std::fs;
use std::path::{Path, PathBuf};

use boundary_growth::cli::run_with;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let mut full = vec!["bgrowth"];
    full.extend_from_slice(args);
    let code = run_with(full, &mut o, &mut e);
    (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const POWER_LAW: &str = r#"{"n": 3, "radials": [{"coeff": 0.15915494309189535, "q": -1.0, "r0": 0.0, "r1": 1.0}]}"#;

#[test]
fn trace_writes_csv_with_target_column() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "mu.json", POWER_LAW);
    let out = dir.path().join("trace.csv");
    let (code, _, err) = run(&["trace", "--measure", s(&mu), "--t", "1e-1:1e-4:log7", "--alpha", "1", "--out", s(&out)]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,u,u_t_alpha,target"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 7);
    let last = rows.last().unwrap();
    assert!((last[2] / last[3] - 1.0).abs() < 1e-2, "{last:?}");
}

#[test]
fn extend_prints_one_number() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "atom.json", r#"{"n": 2, "atoms": [{"xi": [0.0], "mass": 1.0}]}"#);
    let (code, out, _) = run(&["extend", "--measure", s(&mu), "--point", "0,1"]);
    assert_eq!(code, 0);
    // K(0, 1) = 1 / pi in the upper half-plane
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
    let (code, _, err) = run(&["extend", "--measure", s(&mu), "--point", "0,1,2"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn verify_case_passes() {
    let dir = TempDir::new().unwrap();
    let case = write(
        dir.path(),
        "case.json",
        r#"{"n": 3, "alpha": 0.0, "b": 1.0, "R": 1.0, "t_min": 1e-4, "t_max": 0.1, "points_per_decade": 4, "tolerance": 0.02}"#,
    );
    let (code, out, err) = run(&["verify", "--case", s(&case)]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["forward"].is_object() && v["converse"].is_object());
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"n\": 3, \"alpha\": ");
    assert_eq!(run(&["verify", "--case", s(&bad)]).0, 2);
    let wrong = write(dir.path(), "wrong.json", r#"{"n": 1, "atoms": []}"#);
    assert_eq!(run(&["trace", "--measure", s(&wrong), "--t", "0.1", "--alpha", "0"]).0, 2);
    assert_eq!(run(&["trace", "--measure", "/nonexistent/mu.json", "--t", "0.1", "--alpha", "0"]).0, 2);
}

#[test]
fn mellin_writes_rows() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("khat.csv");
    let (code, _, _) = run(&["mellin", "--alpha", "-0.5", "--n", "4", "--y", "-10:10:41", "--out", s(&out)]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 42);
    for line in text.lines().skip(1) {
        let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff <= 1e-8);
    }
}

#[test]
fn derivative_reports_limit() {
    let dir = TempDir::new().unwrap();
    let mu = write(dir.path(), "patch.json", r#"{"n": 3, "patches": [{"lo": [-1, -1], "hi": [1, 1], "density": 2.0}]}"#);
    let (code, out, _) = run(&["derivative", "--measure", s(&mu)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["symmetric"].is_object() && v["strong"]["exists"] == Value::Bool(true));
}

#[test]
fn beurling_sequence() {
    let dir = TempDir::new().unwrap();
    let points: Vec<String> = (1..=12).map(|k| format!("[0.0, 0.0, {}]", 2f64.powi(-k))).collect();
    let seq = write(
        dir.path(),
        "seq.json",
        &format!(r#"{{"n": 3, "base": [0.0, 0.0], "points": [{}]}}"#, points.join(",")),
    );
    let (code, out, _) = run(&["beurling", "--sequence", s(&seq)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["sum"].is_object());
    let atom = write(dir.path(), "atom.json", r#"{"n": 3, "atoms": [{"xi": [0.0, 0.0], "mass": 2.0}]}"#);
    let (code, out, _) = run(&["beurling", "--sequence", s(&seq), "--measure", s(&atom), "--kappa", "1.5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["hypothesis_holds"], Value::Bool(true));
    assert_eq!(v["atom_inequality"], Value::Bool(true));
}

#[test]
fn ball_subcommands() {
    let dir = TempDir::new().unwrap();
    let unit = write(dir.path(), "uniform.json", r#"{"n": 3, "base_point": [0, 0, 1], "patches": [{"r0": 0.0, "r1": 2.0, "density": 1.0}]}"#);
    let (code, out, err) = run(&["ball", "extend", "--measure", s(&unit), "--point", "0.1,0.2,-0.3"]);
    assert_eq!(code, 0, "{err}");
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-8, "{v}");

    let (code, out, err) = run(&["ball", "trace", "--measure", s(&unit), "--t", "0.1,0.01", "--alpha", "0"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 3);

    let cap = write(dir.path(), "cap.json", r#"{"n": 3, "base_point": [0, 0, 1], "patches": [{"r0": 0.0, "r1": 0.2, "density": 1.0}]}"#);
    let (code, out, err) = run(&["ball", "project", "--measure", s(&cap), "--epsilon", "0.5"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n"], 3);

    let (code, out, _) = run(&["ball", "verify", "--alpha", "0", "--cap", "0.5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}
