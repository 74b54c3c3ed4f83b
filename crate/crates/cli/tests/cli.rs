// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::process::{Command, Output};

fn bilindblad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilindblad")).args(args).env_remove("BILINDBLAD_SEED").output().unwrap()
}

#[test]
fn qubit_run_writes_report_and_coherences() {
    let dir = tempfile::tempdir().unwrap();
    let out = bilindblad(&["verify", "--model", "qubit_dephasing", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report.as_bytes(), out.stdout.as_slice());
    assert!(report.contains("dim ker 𝓛† = 2"));
    let csv = fs::read_to_string(dir.path().join("coherences.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,sector_nu,sector_mu,block_norm,predicted_norm"));
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((cols[3] - cols[4]).abs() <= 1e-8 * cols[4].max(1e-300), "{line}");
    }
    assert!(!dir.path().join("egorov_sweep.csv").exists());
}

#[test]
fn empty_times_write_report_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = bilindblad(&["verify", "--model", "qubit_dephasing", "--times", "", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("report.txt").exists());
    assert!(!dir.path().join("coherences.csv").exists());
}

#[test]
fn oscillator_sweep_file_ends_with_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = bilindblad(&["sweep", "--model", "oscillator", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("egorov_sweep.csv")).unwrap();
    assert_eq!(csv.as_bytes(), out.stdout.as_slice());
    assert_eq!(csv.lines().last(), Some("slope=2.00±0.20"));
}

#[test]
fn exported_model_verifies_like_the_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("euler.json");
    let export = bilindblad(&["export-model", "--model", "euler_pencil"]);
    fs::write(&path, &export.stdout).unwrap();
    let a = bilindblad(&["verify", "--model", "euler_pencil", "--seed", "3"]);
    let b = bilindblad(&["verify", "--config", path.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pencil_suite_reports_exact_jacobiator() {
    let out = bilindblad(&["verify", "--model", "euler_pencil", "--suite", "pencil"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("jacobiator ≡ 0 in (m1,m2,m3,lambda)"));
}

#[test]
fn seed_variable_and_flag() {
    let run = |seed_env: Option<&str>, args: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bilindblad"));
        cmd.args(args).env_remove("BILINDBLAD_SEED");
        if let Some(s) = seed_env {
            cmd.env("BILINDBLAD_SEED", s);
        }
        String::from_utf8(cmd.output().unwrap().stdout).unwrap()
    };
    assert!(run(Some("5"), &["verify", "--model", "qubit_dephasing"]).contains("seed: 5\n"));
    assert!(run(Some("5"), &["verify", "--model", "qubit_dephasing", "--seed", "8"]).contains("seed: 8\n"));
}

#[test]
fn errors_use_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\n  \"name\": \"x\",\n  oops\n}\n").unwrap();
    let out = bilindblad(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = bilindblad(&["verify", "--model", "qubit_dephasing", "--tol-cp=-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("suite.tolerances.cp"));
    let out = bilindblad(&["verify", "--model", "linear_contact"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lists_models() {
    for args in [&["list-models"][..], &["--list-models"][..]] {
        let out = bilindblad(args);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("euler_pencil"));
    }
}
