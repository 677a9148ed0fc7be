use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn opinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opinv")).args(args).output().expect("binary runs")
}

fn write_config(name: &str, json: &str) -> PathBuf {
    let path = scratch(name);
    fs::write(&path, json).unwrap();
    path
}

#[test]
fn verify_pair_passes_and_writes_report() {
    let out = scratch("pair.json");
    let _ = fs::remove_file(&out);
    let o = opinv(&["verify-pair", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["command"], "verify-pair");
    assert_eq!(report["all_pass"], true);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS pair.ba_identity"));
}

#[test]
fn verify_pair_edge_configs() {
    for (name, json) in [
        ("nu0.json", r#"{"nu": [0.0, 0.0]}"#),
        ("n1.json", r#"{"truncation_n": 1}"#),
    ] {
        let cfg = write_config(name, json);
        let out = scratch(&format!("out-{name}"));
        let o = opinv(&["verify-pair", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
    }
}

#[test]
fn remark_check_exits_with_failure() {
    let out = scratch("remark.json");
    let csv = scratch("remark.csv");
    let o = opinv(&["remark-check", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL remark.as_stated"));
    assert!(stdout.contains("PASS remark.corrected"));
    assert!(fs::read_to_string(&csv).unwrap().lines().count() > 1);
}

#[test]
fn inadmissible_parameters_are_an_error() {
    let cfg = write_config("pos-nu.json", r#"{"nu": [0.5, 0.0]}"#);
    let out = scratch("pos-nu-out.json");
    let o = opinv(&["volterra", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn unknown_config_field_is_an_error() {
    let cfg = write_config("unknown.json", r#"{"truncation": 3}"#);
    let o = opinv(&["verify-pair", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_override_is_recorded() {
    let cfg = write_config("seed.json", r#"{"input": {"kind": "random", "scale": 0.5}}"#);
    let out = scratch("seed-out.json");
    let o = opinv(&["verify-pair", "--config", cfg.to_str().unwrap(), "--seed", "77", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 77);
}
