//! Serialized trial records and run summaries.
//!
//! Raw records are JSON lines, one [`TrialRecord`] per trial in trial order.
//! Summaries are a single JSON document plus an optional CSV table. Every
//! record and summary carries `schema_version`.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::Experiment;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for TrialError {
    fn from(e: &Error) -> Self {
        TrialError {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub trial_index: u64,
    pub derived_seed: u64,
    pub inputs: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<TrialError>,
    /// Seconds; present only when timing was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl TrialRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// Deserializes the payload of a successful trial.
    pub fn output<T: serde::de::DeserializeOwned>(&self) -> Option<T> {
        self.outputs.as_ref().and_then(|v| serde_json::from_value(v.clone()).ok())
    }
}

/// Column-labelled table; the first column holds row labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, label: impl ToString, values: &[f64]) {
        let mut row = vec![label.to_string()];
        row.extend(values.iter().map(|v| v.to_string()));
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub trials: usize,
    pub succeeded: usize,
    pub failed: usize,
    /// Failure counts keyed by error kind, in sorted order.
    pub failure_kinds: std::collections::BTreeMap<String, usize>,
    pub stats: serde_json::Value,
    /// Plot-ready view of `stats`, written as CSV rather than JSON.
    #[serde(skip)]
    pub table: Option<Table>,
}

pub fn records_to_jsonl(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn read_jsonl(text: &str) -> Result<Vec<TrialRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::invalid(e.to_string())))
        .collect()
}

/// Paths of the summary files that accompany a records file.
pub fn summary_paths(records: &Path) -> (PathBuf, PathBuf) {
    let stem = records
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    let dir = records.parent().unwrap_or(Path::new(""));
    (
        dir.join(format!("{stem}.summary.json")),
        dir.join(format!("{stem}.summary.csv")),
    )
}

/// Writes records, the JSON summary and (when present) the CSV table.
pub fn write_outputs(path: &Path, records: &[TrialRecord], summary: &Summary) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::File::create(path)?.write_all(records_to_jsonl(records).as_bytes())?;
    let (json, csv_path) = summary_paths(path);
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    std::fs::write(json, text + "\n")?;
    if let Some(t) = &summary.table {
        std::fs::write(csv_path, t.to_csv()?)?;
    }
    Ok(())
}
