// SPDX-License-Identifier: Apache-2.0

//! Run directories, manifests and parameter sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mockq::io::{Column, Table};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, Result};
use crate::experiments::{execute, Failure, Sink};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SWEEP_MANIFEST_FILE: &str = "sweep.json";
pub const SWEEP_TABLE_FILE: &str = "sweep.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub name: String,
    pub value: f64,
}

/// Contents of `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub software_version: String,
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub output_dir: PathBuf,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub artifacts: Vec<Artifact>,
    /// SHA-256 over the sorted `file:sha256` lines of all artifacts.
    pub content_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline: Option<Headline>,
    pub metrics: BTreeMap<String, f64>,
}

impl RunRecord {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::io(&path, e))
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn content_hash(artifacts: &[Artifact]) -> String {
    let mut lines: Vec<String> = artifacts.iter().map(|a| format!("{}:{}\n", a.file, a.sha256)).collect();
    lines.sort();
    sha256_hex(lines.concat().as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

struct DirSink<'a> {
    dir: &'a Path,
    config_hash: &'a str,
    artifacts: Vec<Artifact>,
}

impl Sink for DirSink<'_> {
    fn emit(&mut self, file: &str, table: Table) -> Result<()> {
        let text = table.with_meta("config_hash", self.config_hash).to_text();
        write_file(&self.dir.join(file), text.as_bytes())?;
        self.artifacts.push(Artifact { file: file.to_string(), sha256: sha256_hex(text.as_bytes()), bytes: text.len() as u64 });
        Ok(())
    }
}

/// Validates `config` and runs it into its output directory.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    run_in(config, &config.output_dir())
}

/// Validates `config` and runs it into `dir`. A failed run still leaves an
/// incomplete manifest next to whatever it wrote.
pub fn run_in(config: &ExperimentConfig, dir: &Path) -> Result<RunRecord> {
    let plan = config.validate()?;
    let (record, error) = execute_in(config, &plan, dir)?;
    match error {
        Some(e) => Err(e),
        None => Ok(record),
    }
}

fn execute_in(
    config: &ExperimentConfig,
    plan: &crate::config::Plan,
    dir: &Path,
) -> Result<(RunRecord, Option<CliError>)> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let config_hash = config.hash();
    let started_unix_ms = now_ms();
    let mut sink = DirSink { dir, config_hash: &config_hash, artifacts: Vec::new() };
    let outcome = execute(plan, &mut sink);
    let (status, metrics, error) = match outcome {
        Ok(m) => (RunStatus::Complete, Some(m), None),
        Err(Failure::Model(source)) => (
            RunStatus::Incomplete,
            None,
            Some(CliError::Experiment { experiment: config.experiment.name().to_string(), source }),
        ),
        Err(Failure::Output(e)) => (RunStatus::Incomplete, None, Some(e)),
    };
    let artifacts = sink.artifacts;
    let record = RunRecord {
        software_version: format!("mockq {}", env!("CARGO_PKG_VERSION")),
        experiment: config.experiment,
        config: config.clone(),
        config_hash,
        output_dir: dir.to_path_buf(),
        started_unix_ms,
        finished_unix_ms: now_ms(),
        status,
        error: error.as_ref().map(ToString::to_string),
        content_hash: content_hash(&artifacts),
        artifacts,
        headline: metrics
            .as_ref()
            .map(|m| Headline { name: m.headline.to_string(), value: m.values[m.headline] }),
        metrics: metrics.map(|m| m.values).unwrap_or_default(),
    };
    let json = serde_json::to_string_pretty(&record).expect("records serialize");
    write_file(&dir.join(MANIFEST_FILE), json.as_bytes())?;
    Ok((record, error))
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub value: String,
    pub output_dir: PathBuf,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline: Option<Headline>,
    pub metrics: BTreeMap<String, f64>,
}

/// Contents of `sweep.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub software_version: String,
    pub parameter: String,
    pub base_config_hash: String,
    pub points: Vec<SweepPoint>,
}

impl SweepRecord {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.status != RunStatus::Complete).count()
    }
}

fn literal(text: &str) -> Result<toml::Value> {
    #[derive(Deserialize)]
    struct Wrapper {
        v: toml::Value,
    }
    match toml::from_str::<Wrapper>(&format!("v = {text}")) {
        Ok(w) => Ok(w.v),
        Err(_) => Ok(toml::Value::String(text.to_string())),
    }
}

/// Replaces the value at a dotted `path`; integers become floats where the
/// current value is a float.
pub fn set_path(doc: &mut toml::Value, path: &str, text: &str) -> Result<()> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Sweep(format!("malformed parameter path `{path}`")));
    }
    let (leaf, parents) = keys.split_last().expect("split yields a key");
    let mut table = doc.as_table_mut().expect("configs are tables");
    for key in parents {
        table = table
            .get_mut(*key)
            .and_then(toml::Value::as_table_mut)
            .ok_or_else(|| CliError::Sweep(format!("parameter path `{path}` does not resolve at `{key}`")))?;
    }
    let mut value = literal(text)?;
    if let (Some(toml::Value::Float(_)), toml::Value::Integer(i)) = (table.get(*leaf), &value) {
        value = toml::Value::Float(*i as f64);
    }
    table.insert(leaf.to_string(), value);
    Ok(())
}

/// Configuration of every sweep point, each validated; fails before any
/// output is written if a value cannot be placed at `path`.
pub fn sweep_configs(base: &ExperimentConfig, path: &str, values: &[String]) -> Result<Vec<ExperimentConfig>> {
    let doc = toml::Value::try_from(base).expect("configs serialize");
    values
        .iter()
        .map(|text| {
            let mut point = doc.clone();
            set_path(&mut point, path, text)?;
            point
                .try_into::<ExperimentConfig>()
                .map_err(|e| CliError::Sweep(format!("`{path} = {text}`: {}", e.message())))
        })
        .collect()
}

/// Runs one point per value under `<output>/point_NNN`, in parallel. A failed
/// point is recorded and does not stop the others. No values, no output.
pub fn sweep(base: &ExperimentConfig, path: &str, values: &[String]) -> Result<SweepRecord> {
    let configs = sweep_configs(base, path, values)?;
    let record = SweepRecord {
        software_version: format!("mockq {}", env!("CARGO_PKG_VERSION")),
        parameter: path.to_string(),
        base_config_hash: base.hash(),
        points: Vec::new(),
    };
    if configs.is_empty() {
        return Ok(record);
    }
    let root = base.output_dir();
    let points: Vec<SweepPoint> = configs
        .par_iter()
        .zip(values)
        .enumerate()
        .map(|(index, (config, value))| {
            let dir = root.join(format!("point_{index:03}"));
            let outcome = config.validate().and_then(|plan| execute_in(config, &plan, &dir));
            let mut point = SweepPoint {
                index,
                value: value.clone(),
                output_dir: dir,
                status: RunStatus::Incomplete,
                error: None,
                content_hash: None,
                headline: None,
                metrics: BTreeMap::new(),
            };
            match outcome {
                Ok((run, error)) => {
                    point.status = run.status;
                    point.error = error.map(|e| e.to_string());
                    point.content_hash = Some(run.content_hash);
                    point.headline = run.headline;
                    point.metrics = run.metrics;
                }
                Err(e) => point.error = Some(e.to_string()),
            }
            point
        })
        .collect();
    let record = SweepRecord { points, ..record };
    write_file(&root.join(SWEEP_TABLE_FILE), sweep_table(&record).with_meta("config_hash", &record.base_config_hash).to_text().as_bytes())?;
    let json = serde_json::to_string_pretty(&record).expect("records serialize");
    write_file(&root.join(SWEEP_MANIFEST_FILE), json.as_bytes())?;
    Ok(record)
}

/// `(index, value, complete, metrics...)`; non-numeric values and missing
/// metrics are NaN.
pub fn sweep_table(record: &SweepRecord) -> Table {
    let names: BTreeSet<&String> = record.points.iter().flat_map(|p| p.metrics.keys()).collect();
    let mut columns = vec![Column::new("index", "1"), Column::new("value", "1"), Column::new("complete", "1")];
    columns.extend(names.iter().map(|n| Column::new(n, "1")));
    let mut table = Table::new("sweep", columns).with_meta("parameter", &record.parameter);
    if let Some(h) = record.points.iter().find_map(|p| p.headline.as_ref()) {
        table.set_meta("headline", &h.name);
    }
    for p in &record.points {
        let mut row = vec![p.index as f64, p.value.parse().unwrap_or(f64::NAN), f64::from(u8::from(p.status == RunStatus::Complete))];
        row.extend(names.iter().map(|n| p.metrics.get(*n).copied().unwrap_or(f64::NAN)));
        table.rows.push(row);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            "experiment = \"spectrum\"\n[model]\nkind = \"harmonic\"\ngamma = 1.0\nalpha1 = 1.0\nalpha2 = 1.0\n",
        )
        .unwrap()
    }

    #[test]
    fn paths_resolve_against_the_effective_config() {
        let configs = sweep_configs(&base(), "numerics.hbar", &["0.02".into(), "1".into()]).unwrap();
        assert_eq!(configs[0].numerics.hbar, 0.02);
        assert_eq!(configs[1].numerics.hbar, 1.0);
    }

    #[test]
    fn unresolved_paths_and_bad_types_fail_up_front() {
        assert!(matches!(sweep_configs(&base(), "nope.hbar", &["1".into()]), Err(CliError::Sweep(_))));
        assert!(matches!(sweep_configs(&base(), "numerics.hbr", &["1".into()]), Err(CliError::Sweep(_))));
        assert!(matches!(sweep_configs(&base(), "spectrum.levels", &["1.5".into()]), Err(CliError::Sweep(_))));
        assert!(matches!(sweep_configs(&base(), "numerics..hbar", &["1".into()]), Err(CliError::Sweep(_))));
    }

    #[test]
    fn content_hash_ignores_artifact_order() {
        let a = Artifact { file: "a".into(), sha256: "1".into(), bytes: 1 };
        let b = Artifact { file: "b".into(), sha256: "2".into(), bytes: 1 };
        assert_eq!(content_hash(&[a.clone(), b.clone()]), content_hash(&[b, a]));
    }

    #[test]
    fn sweep_table_fills_missing_metrics_with_nan() {
        let point = |index: usize, metrics: &[(&str, f64)]| SweepPoint {
            index,
            value: index.to_string(),
            output_dir: PathBuf::new(),
            status: RunStatus::Complete,
            error: None,
            content_hash: None,
            headline: None,
            metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        let record = SweepRecord {
            software_version: String::new(),
            parameter: "x".into(),
            base_config_hash: String::new(),
            points: vec![point(0, &[("a", 1.0)]), point(1, &[("b", 2.0)])],
        };
        let table = sweep_table(&record);
        assert_eq!(table.columns.len(), 5);
        assert!(table.rows[0][4].is_nan() && table.rows[1][3].is_nan());
    }
}
