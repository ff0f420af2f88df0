use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn floatctl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floatctl")).arg("--out").arg(dir).args(args).output().unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = floatctl(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_writes_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = floatctl(dir.path(), &["spectrum"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).count();
    assert_eq!(rows, 31, "header plus 30 roots");
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["subcommand"], "spectrum");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let outputs: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(outputs.contains(&"spectrum.csv"));
}

#[test]
fn config_file_hash_matches_its_text() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/cfg0.toml");
    let out = floatctl(dir.path(), &["--config", cfg.to_str().unwrap(), "spectrum", "--count", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read_json(&dir.path().join("manifest.json"));
    let text = std::fs::read(&cfg).unwrap();
    assert_eq!(manifest["config_hash"], hex::encode(Sha256::digest(&text)));
}

#[test]
fn missing_config_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = floatctl(dir.path(), &["--config", "/nonexistent/cfg.toml", "spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["exit_code"], 2);
}

#[test]
fn short_horizon_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = floatctl(dir.path(), &["steer", "--tau", "3.0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "horizon_too_short");
}

#[test]
fn oversized_nonlinear_step_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        floatctl(dir.path(), &["--cells", "50", "simulate", "--nonlinear", "--init-modes", "1", "--t-final", "1", "--dt", "0.5"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn steer_then_replay_the_control() {
    let dir = tempfile::tempdir().unwrap();
    let out = floatctl(dir.path(), &["--cells", "100", "steer", "--modes", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("steer.json"));
    assert!(report["modal_error"].as_f64().unwrap() < 1e-4);

    let replay = tempfile::tempdir().unwrap();
    let control = dir.path().join("control.csv");
    let tau = report["tau"].as_f64().unwrap().to_string();
    let out = floatctl(
        replay.path(),
        &["--cells", "100", "simulate", "--control", control.to_str().unwrap(), "--t-final", &tau, "--snapshot-every", "0"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(replay.path().join("ledger.csv").exists());
}

#[test]
fn stabilize_reports_monotone_decay() {
    let dir = tempfile::tempdir().unwrap();
    let out = floatctl(dir.path(), &["--cells", "60", "stabilize", "--init-modes", "1,2", "--t-final", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("stabilize.json"));
    assert_eq!(report["monotone"], true);
}

#[test]
fn check_passes_on_the_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = floatctl(dir.path(), &["check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = read_json(&dir.path().join("check.json"));
    assert!(rows.as_array().unwrap().iter().all(|r| r["passed"] == true));
}
