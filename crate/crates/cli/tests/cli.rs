use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mcm_lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcm-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn sidecar(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap()
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["fig2", "--variant", "d", "--shots", "40", "--seed", "5"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(mcm_lab(&args, &a).status.success());
    assert!(mcm_lab(&args, &b).status.success());
    for name in ["fig2_traces.csv", "fig2_sensor_histogram.csv", "metrics.csv", "run.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn different_seed_different_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(mcm_lab(&["fig2", "--variant", "c", "--shots", "40", "--seed", "1"], &a).status.success());
    assert!(mcm_lab(&["fig2", "--variant", "c", "--shots", "40", "--seed", "2"], &b).status.success());
    assert_ne!(
        fs::read(a.join("fig2_traces.csv")).unwrap(),
        fs::read(b.join("fig2_traces.csv")).unwrap()
    );
}

#[test]
fn sidecar_records_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    assert!(mcm_lab(&["tradeoff", "--exact", "--seed", "3"], &out).status.success());
    let run = sidecar(&out);
    assert_eq!(run["experiment"], "tradeoff");
    assert_eq!(run["seed"], 3);
    assert_eq!(run["exact"], true);
    assert!(run["shots"].is_null());
    assert_eq!(run["config_sha256"].as_str().unwrap().len(), 64);
    assert!(out.join("tradeoff.csv").exists());
}

#[test]
fn config_hash_follows_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("device.toml");
    fs::write(&cfg, mcm_core::device::DEFAULT_DEVICE_TOML).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let path = cfg.to_str().unwrap();
    assert!(mcm_lab(&["tradeoff", "--config", path], &a).status.success());
    assert!(mcm_lab(&["tradeoff"], &b).status.success());
    assert_eq!(sidecar(&a)["config_sha256"], sidecar(&b)["config_sha256"]);
    assert_eq!(sidecar(&a)["config_path"], path);
    assert_eq!(
        fs::read(a.join("tradeoff.csv")).unwrap(),
        fs::read(b.join("tradeoff.csv")).unwrap()
    );
}

#[test]
fn json_format() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("j");
    let o = mcm_lab(&["tomography", "--scenario", "z-echo", "--exact", "--format", "json"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("tomography.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "tomography");
    let fidelity = report["metrics"]["fidelity"].as_f64().unwrap();
    assert!(fidelity > 0.5 && fidelity <= 1.0);
    let names: Vec<&str> = report["tables"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"tomography_estimate"));
    assert!(!out.join("metrics.csv").exists());
}

#[test]
fn bad_variant_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mcm_lab(&["fig2", "--variant", "z"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mcm_lab(&["stark", "--config", "/nonexistent/device.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, format!("{}\nbogus_key = 1\n", mcm_core::device::DEFAULT_DEVICE_TOML)).unwrap();
    let o = mcm_lab(&["tradeoff", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shots_and_exact_conflict() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mcm_lab(&["stark", "--exact", "--shots", "10"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_ramsey_grid_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = mcm_lab(&["ramsey-mcm", "--t-min-us", "10", "--t-max-us", "5"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}
