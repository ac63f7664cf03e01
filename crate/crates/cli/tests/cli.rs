use std::path::Path;
use std::process::Command;

use serde_json::Value;
use sha2::{Digest, Sha256};

const SMALL: &str = r#""params": {"d": 3, "p": 3, "a": -0.2},
    "grid": {"n": 512, "r_max": 20},
    "t_final": 4,
    "data": {"family": "gaussian", "amplitude": 1, "center": 0, "width": 1}"#;

fn wavelab(dir: &Path, experiment: &str, config: &str, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join(format!("{experiment}.json"));
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wavelab"))
        .arg(experiment)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap_or(-1), text)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn params_report_lists_derived_constants() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = wavelab(dir.path(), "params", r#"{"params": {"d": 3, "p": 3, "a": -0.2}}"#, &["--assert"]);
    assert_eq!(code, 0);
    let report = read_json(&dir.path().join("out/report.json"));
    assert_eq!(report["derived"]["beta"], 0.25);
    assert_eq!(report["derived"]["kappa_0"], 0.5);
    assert_eq!(report["result"]["a_min"], -0.25);
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn manifest_checksums_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = wavelab(dir.path(), "simulate", &format!("{{{SMALL}}}"), &[]);
    assert_eq!(code, 0, "{text}");
    let out = dir.path().join("out");
    let manifest = read_json(&out.join("manifest.json"));
    let files = manifest["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["path"].as_str().unwrap()).collect();
    assert_eq!(names, ["report.json", "series/energy.csv", "series/final.csv"]);
    for f in files {
        let bytes = std::fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(f["sha256"].as_str().unwrap(), digest);
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
    }
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["config_hash"], manifest["config_hash"]);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = format!("{{{SMALL}, \"eta\": [1], \"windows\": [[2, 3]]}}");
    assert_eq!(wavelab(a.path(), "flux-check", &config, &[]).0, 0);
    assert_eq!(wavelab(b.path(), "flux-check", &config, &[]).0, 0);
    for rel in ["report.json", "series/energy.csv", "series/cone_eta_1.csv"] {
        let x = std::fs::read(a.path().join("out").join(rel)).unwrap();
        let y = std::fs::read(b.path().join("out").join(rel)).unwrap();
        assert!(x == y, "{rel} differs");
    }
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = wavelab(dir.path(), "simulate", &format!("{{{SMALL}, \"tfinal\": 3}}"), &[]);
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("tfinal"));
    let (code, _) = wavelab(dir.path(), "simulat", &format!("{{{SMALL}}}"), &[]);
    assert_eq!(code, 2);
    let (code, text) = wavelab(dir.path(), "simulate", &format!("{{{SMALL}}}").replace("\"p\": 3", "\"p\": 6"), &[]);
    assert_eq!(code, 2);
    assert!(text.contains("params"), "{text}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unstable_run_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{{{SMALL}}}").replace("\"amplitude\": 1", "\"amplitude\": 1000");
    let (code, text) = wavelab(dir.path(), "simulate", &config, &[]);
    assert_eq!(code, 3, "{text}");
}

#[test]
fn failed_checks_exit_with_4_only_under_assert() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!("{{{SMALL}, \"tolerance\": 1e-300}}");
    let (code, text) = wavelab(dir.path(), "simulate", &config, &[]);
    assert_eq!(code, 0);
    assert!(text.contains("FAIL energy_drift"), "{text}");
    let (code, _) = wavelab(dir.path(), "simulate", &config, &["--assert"]);
    assert_eq!(code, 4);
}

#[test]
fn thread_cap_does_not_change_output() {
    let config = r#"{"params": {"d": 3, "p": 3, "a": -0.2}, "grid": {"n": 256, "r_max": 8}, "samples": 12, "seed": 3}"#;
    let mut reports = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, config).unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_wavelab"))
            .args(["hardy-check", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join("out"))
            .env("WAVELAB_THREADS", threads)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        reports.push(std::fs::read(dir.path().join("out/report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
