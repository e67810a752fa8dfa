// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::Command;

use mockq::io::Table;
use mockq_cli::runner::{MANIFEST_FILE, SWEEP_MANIFEST_FILE};
use mockq_cli::{run_in, sweep, CliError, ExperimentConfig, RunRecord, RunStatus, OUTPUT_ROOT_ENV};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn config(name: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::load(&config_path(name)).unwrap();
    cfg.output.dir = out.to_path_buf();
    cfg
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != MANIFEST_FILE)
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn stochastic_runs_are_byte_reproducible() {
    for name in ["stochastic.toml", "cancellation_noisy.toml"] {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = config(name, tmp.path());
        let a = run_in(&cfg, &tmp.path().join("a")).unwrap();
        let b = run_in(&cfg, &tmp.path().join("b")).unwrap();
        assert_eq!(a.content_hash, b.content_hash, "{name}");
        assert_eq!(files(&tmp.path().join("a")), files(&tmp.path().join("b")), "{name}");
        assert_eq!(RunRecord::load(&tmp.path().join("a")).unwrap(), a);
    }
}

#[test]
fn a_different_seed_changes_the_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config("cancellation_noisy.toml", tmp.path());
    let a = run_in(&cfg, &tmp.path().join("a")).unwrap();
    cfg.numerics.seed += 1;
    let b = run_in(&cfg, &tmp.path().join("b")).unwrap();
    assert_ne!(a.content_hash, b.content_hash);
}

#[test]
fn outputs_carry_the_config_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("spectrum.toml", tmp.path());
    let record = run_in(&cfg, tmp.path()).unwrap();
    assert_eq!(record.status, RunStatus::Complete);
    assert_eq!(record.artifacts.len(), 2);
    for a in &record.artifacts {
        let table = Table::read(std::io::BufReader::new(std::fs::File::open(tmp.path().join(&a.file)).unwrap())).unwrap();
        assert_eq!(table.meta("config_hash"), Some(cfg.hash().as_str()));
    }
}

#[test]
fn harmonic_ground_state_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let record = run_in(&config("spectrum.toml", tmp.path()), tmp.path()).unwrap();
    let e0 = record.headline.unwrap();
    assert_eq!(e0.name, "E_0");
    assert!((e0.value - 2.005).abs() <= 1e-8, "{}", e0.value);
}

#[test]
fn invalid_dt_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let text = std::fs::read_to_string(config_path("cancellation.toml"))
        .unwrap()
        .replace("t_end = 0.7853981633974483", "t_end = 0.5\ndt = 0.0")
        .replace("out/cancellation", &out.display().to_string());
    let path = tmp.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_mockq")).arg("run").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let line: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(line["error"]["kind"], "validation");
    assert!(!out.exists());
}

#[test]
fn oversized_dt_is_rejected_by_the_time_step_guard() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config("cancellation.toml", tmp.path());
    cfg.numerics.dt = Some(0.5);
    assert!(matches!(run_in(&cfg, &tmp.path().join("x")), Err(CliError::Validation(_))));
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn empty_sweep_has_no_side_effects() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let record = sweep(&config("spectrum.toml", &out), "numerics.hbar", &[]).unwrap();
    assert!(record.points.is_empty());
    assert!(!out.exists());
}

#[test]
fn deficit_sweep_divergence_decreases() {
    let tmp = tempfile::tempdir().unwrap();
    let values: Vec<String> = ["0.2", "0.1", "0.05", "0"].map(String::from).to_vec();
    let record = sweep(&config("cancellation.toml", tmp.path()), "cancellation.deficit", &values).unwrap();
    assert_eq!(record.failures(), 0);
    let d: Vec<f64> = record.points.iter().map(|p| p.headline.as_ref().unwrap().value).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[3] <= 1e-8);
    assert!(tmp.path().join(SWEEP_MANIFEST_FILE).exists());
    assert!(tmp.path().join("point_003").join(MANIFEST_FILE).exists());
}

#[test]
fn hbar_sweep_on_the_full_model_approaches_the_harmonic_value() {
    let tmp = tempfile::tempdir().unwrap();
    let values: Vec<String> = ["0.04", "0.02", "0.01"].map(String::from).to_vec();
    let record = sweep(&config("spectrum_lv.toml", tmp.path()), "numerics.hbar", &values).unwrap();
    let gaps: Vec<f64> = record.points.iter().map(|p| p.metrics["E0_minus_harmonic"].abs()).collect();
    for w in gaps.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=5.0).contains(&ratio), "{gaps:?}");
    }
}

#[test]
fn a_failing_point_does_not_stop_the_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let values: Vec<String> = ["0.5", "3.0", "1.0"].map(String::from).to_vec();
    let record = sweep(&config("psi_equation.toml", tmp.path()), "numerics.t_end", &values).unwrap();
    let status: Vec<RunStatus> = record.points.iter().map(|p| p.status).collect();
    assert_eq!(status, [RunStatus::Complete, RunStatus::Incomplete, RunStatus::Complete]);
    let failed = RunRecord::load(&record.points[1].output_dir).unwrap();
    assert!(failed.error.unwrap().starts_with("psi_equation experiment failed"));
    assert_eq!(failed.status, RunStatus::Incomplete);
    assert!(failed.artifacts.iter().any(|a| a.file == "psi_initial.csv"));
    assert!(failed.headline.is_none());
}

#[test]
fn output_root_variable_relocates_relative_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_mockq"))
        .arg("run")
        .arg(config_path("thooft.toml"))
        .env(OUTPUT_ROOT_ENV, tmp.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let record = RunRecord::load(&tmp.path().join("out/thooft")).unwrap();
    assert!(record.metrics["terminal_gap"] <= 1e-10);
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(summary["content_hash"], record.content_hash.as_str());
}

#[test]
fn validate_verb_reports_without_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_mockq"))
        .arg("validate")
        .arg(config_path("psi_equation.toml"))
        .env(OUTPUT_ROOT_ENV, tmp.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(summary["status"], "valid");
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}
