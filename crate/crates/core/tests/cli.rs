use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_below_threshold() {
    let out = run(&["spectrum", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 0);
    assert_eq!(v["ac_band"], serde_json::json!([0.0, 4.0]));
}

#[test]
fn spectrum_with_eigenvalues() {
    let out = run(&["spectrum", "--alpha", "4", "--format", "json"]);
    let v = json(&out);
    let eigs = v["eigenvalues"].as_array().unwrap();
    assert!(v["count"].as_u64().unwrap() >= 1);
    assert_eq!(eigs.len() as u64, v["count"].as_u64().unwrap());
    assert!(eigs.iter().all(|e| e["lambda_K"].as_f64().unwrap() > 0.5));
}

#[test]
fn invalid_alpha_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("spec.json");
    let out = run(&["spectrum", "--alpha", "-1", "--out", path(&out_file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert!(!out_file.exists());
}

#[test]
fn sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let out = run(&["sweep", "--min", "1", "--max", "4", "--step", "0.5", "--out", path(&csv)]);
    assert!(matches!(out.status.code(), Some(0) | Some(2)));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("alpha,band_top,count"));
    let out = run(&["plot", "--input", path(&csv), "--out", path(&svg)]);
    assert_eq!(out.status.code(), Some(0));
    let figure = std::fs::read_to_string(&svg).unwrap();
    assert!(figure.contains(r#"id="band""#));
    assert!(figure.matches("<polyline").count() >= 1);
}

#[test]
fn band_only_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let svg = dir.path().join("b.svg");
    let out = run(&["sweep", "--min", "0.1", "--max", "1", "--step", "0.1", "--out", path(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["plot", "--input", path(&csv), "--out", path(&svg)]);
    assert_eq!(out.status.code(), Some(0));
    let figure = std::fs::read_to_string(&svg).unwrap();
    assert!(figure.contains(r#"id="band""#));
    assert_eq!(figure.matches("<polyline").count(), 0);
}

#[test]
fn plot_rejects_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let svg = dir.path().join("e.svg");
    std::fs::write(&csv, "alpha,band_top,count\n").unwrap();
    let out = run(&["plot", "--input", path(&csv), "--out", path(&svg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!svg.exists());
}

#[test]
fn rkt_verdicts() {
    let v = json(&run(&["rkt", "--alpha", "0.5"]));
    assert_eq!(v["holds"], true);
    assert!((v["S_squared"].as_f64().unwrap() - 4.0).abs() <= 5e-3);
    assert_eq!(json(&run(&["rkt", "--alpha", "1"]))["holds"], true);
    let v = json(&run(&["rkt", "--alpha", "2"]));
    assert_eq!(v["holds"], false);
    assert!(v["count"].as_u64().unwrap() >= 1);
}

#[test]
fn verify_levels() {
    let out = run(&["verify", "--alpha", "1", "--level", "quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
    let out = run(&["verify", "--alpha", "4", "--level", "full", "--trunc-n", "2000"]);
    let v = json(&out);
    assert_eq!(out.status.code(), Some(0), "{v}");
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"two_oracle_agreement") && names.contains(&"rkt_consistency"));
}

#[test]
fn output_is_deterministic() {
    let args = ["sweep", "--min", "1.5", "--max", "3", "--step", "0.25", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}
