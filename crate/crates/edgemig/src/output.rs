//! Output files: tables as CSV or JSON, and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use edgemig_core::distance_mdp::{DistancePolicy, ValueTable1D};
use edgemig_core::hex::{state_count, HexOffset};
use edgemig_core::hex_mdp::{HexPolicy, ValueTable2D};
use serde::Serialize;

use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Collects the files a command writes into one output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    format: OutputFormat,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path, format: OutputFormat) -> Result<Self, AppError> {
        fs::create_dir_all(root).map_err(|e| AppError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), format, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `rows` to `<stem>.csv` or `<stem>.json`.
    pub fn table<T: Serialize>(&mut self, stem: &str, rows: &[T]) -> Result<PathBuf, AppError> {
        let path = self.root.join(format!("{stem}.{}", self.format.extension()));
        match self.format {
            OutputFormat::Csv => write_csv(&path, rows)?,
            OutputFormat::Json => write_json(&path, &rows)?,
        }
        self.written.push(path.clone());
        Ok(path)
    }

    /// Writes a CSV with a caller-built header, whatever the table format.
    pub fn raw_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, AppError> {
        let path = self.root.join(name);
        let csv_err = |source| AppError::Csv { path: path.clone(), source };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| AppError::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf, AppError> {
        let path = self.root.join(name);
        write_json(&path, value)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), AppError> {
    let csv_err = |source| AppError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), AppError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| AppError::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRow {
    pub d: usize,
    pub action: usize,
    pub value: f64,
}

pub fn distance_rows(policy: &DistancePolicy, values: &ValueTable1D) -> Vec<DistanceRow> {
    (0..=policy.n_max()).map(|d| DistanceRow { d, action: policy.action(d), value: values.get(d) }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HexRow {
    pub ring: u32,
    pub index: u32,
    pub action_ring: u32,
    pub action_index: u32,
    pub value: f64,
}

pub fn hex_rows(policy: &HexPolicy, values: &ValueTable2D) -> Vec<HexRow> {
    (0..state_count(policy.n_max() as u32))
        .map(|k| {
            let s = HexOffset::from_linear_index(k);
            let a = policy.action(s);
            HexRow { ring: s.ring, index: s.index, action_ring: a.ring, action_index: a.index, value: values.get(s) }
        })
        .collect()
}

/// One row of a policy comparison; `state` is `ring:index`, or `mean` for
/// the state-averaged aggregate row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub policy: String,
    pub state: String,
    pub value: f64,
}

pub fn comparison_rows(name: &str, values: &ValueTable2D) -> Vec<ComparisonRow> {
    let mut rows: Vec<ComparisonRow> = values
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &value)| {
            let s = HexOffset::from_linear_index(k);
            ComparisonRow { policy: name.to_string(), state: format!("{}:{}", s.ring, s.index), value }
        })
        .collect();
    rows.push(ComparisonRow { policy: name.to_string(), state: "mean".to_string(), value: values.mean() });
    rows
}

/// Run metadata written next to every command's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub results: serde_json::Value,
    /// Solver wall-clock seconds, excluding I/O.
    pub timing: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &'static str, seed: u64, config: &impl Serialize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            outputs: Vec::new(),
            results: serde_json::Value::Null,
            timing: serde_json::Value::Null,
        }
    }

    /// Records the outputs written so far and saves `manifest.json`.
    pub fn finish(mut self, out: &mut OutputDir) -> Result<PathBuf, AppError> {
        self.outputs = out
            .written()
            .iter()
            .filter_map(|p| p.file_name().and_then(|n| n.to_str()).map(str::to_string))
            .collect();
        out.json("manifest.json", &self)
    }
}
