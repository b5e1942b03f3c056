//! Trace file ingestion.
//!
//! Two formats are read:
//!
//! - cabspotting: a directory with one whitespace-separated file per taxi,
//!   lines `lat lon occupancy epoch`; the entity id is the file stem. Files
//!   whose name starts with `_` (the dataset's index) are skipped.
//! - csv: one file with header `id,timestamp,lat,lon`.
//!
//! Records come back sorted by entity id, then timestamp.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use edgemig_core::simulator::TraceRecord;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{}: no trace records", path.display())]
    Empty { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Cabspotting,
    Csv,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Count malformed lines instead of failing on the first one.
    pub skip_malformed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ingested {
    pub records: Vec<TraceRecord>,
    pub files: usize,
    /// Records whose timestamp precedes the previous record of the same
    /// entity in input order.
    pub reordered: usize,
    pub malformed: usize,
}

impl Ingested {
    pub fn entity_count(&self) -> usize {
        let mut n = 0;
        let mut last: Option<&str> = None;
        for r in &self.records {
            if last != Some(r.entity.as_str()) {
                n += 1;
                last = Some(r.entity.as_str());
            }
        }
        n
    }
}

fn check_coords(lat: f64, lon: f64) -> Result<(), String> {
    if !(-90.0..=90.0).contains(&lat) {
        return Err(format!("latitude {lat} out of range"));
    }
    if !(-180.0..=180.0).contains(&lon) {
        return Err(format!("longitude {lon} out of range"));
    }
    Ok(())
}

/// Parses `lat lon occupancy epoch`; occupancy is ignored.
pub fn parse_cabspotting_line(line: &str) -> Result<(f64, f64, i64), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [lat, lon, _occupancy, epoch] = fields[..] else {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    };
    let lat: f64 = lat.parse().map_err(|_| format!("bad latitude `{lat}`"))?;
    let lon: f64 = lon.parse().map_err(|_| format!("bad longitude `{lon}`"))?;
    let epoch: i64 = epoch.parse().map_err(|_| format!("bad timestamp `{epoch}`"))?;
    check_coords(lat, lon)?;
    Ok((lat, lon, epoch))
}

fn read_to_string(path: &Path) -> Result<String, TraceError> {
    fs::read_to_string(path).map_err(|source| TraceError::Io { path: path.to_path_buf(), source })
}

fn read_cabspotting_file(path: &Path, id: &str, opts: IngestOptions, out: &mut Ingested) -> Result<(), TraceError> {
    let text = read_to_string(path)?;
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_cabspotting_line(line) {
            Ok((lat, lon, timestamp)) => {
                out.records.push(TraceRecord { entity: id.to_string(), timestamp, lat, lon });
            }
            Err(_) if opts.skip_malformed => out.malformed += 1,
            Err(message) => {
                return Err(TraceError::Parse { path: path.to_path_buf(), line: k as u64 + 1, message });
            }
        }
    }
    out.files += 1;
    Ok(())
}

/// Reads every `*.txt` file in `dir` (sorted by name) as one taxi.
pub fn read_cabspotting_dir(dir: &Path, opts: IngestOptions) -> Result<Ingested, TraceError> {
    let io_err = |source| TraceError::Io { path: dir.to_path_buf(), source };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err)?
        .map(|e| e.map(|e| e.path()).map_err(io_err))
        .collect::<Result<_, _>>()?;
    files.retain(|p| {
        p.is_file()
            && p.extension().is_some_and(|e| e == "txt")
            && !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('_'))
    });
    files.sort();
    let mut out = Ingested::default();
    for path in &files {
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        read_cabspotting_file(path, &id, opts, &mut out)?;
    }
    finish(out, dir)
}

#[derive(Deserialize)]
struct CsvRow {
    id: String,
    timestamp: i64,
    lat: f64,
    lon: f64,
}

/// Reads a CSV file with header `id,timestamp,lat,lon`.
pub fn read_csv(path: &Path, opts: IngestOptions) -> Result<Ingested, TraceError> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Ingested { files: 1, ..Ingested::default() };
    let headers = reader
        .headers()
        .map_err(|e| TraceError::Parse { path: path.to_path_buf(), line: 1, message: e.to_string() })?
        .clone();
    for rec in reader.records() {
        let parsed = rec.map_err(|e| (e.position().map_or(0, |p| p.line()), e.to_string())).and_then(|rec| {
            let line = rec.position().map_or(0, |p| p.line());
            let row: CsvRow = rec.deserialize(Some(&headers)).map_err(|e| (line, e.to_string()))?;
            check_coords(row.lat, row.lon).map_err(|m| (line, m))?;
            Ok(row)
        });
        match parsed {
            Ok(r) => out.records.push(TraceRecord { entity: r.id, timestamp: r.timestamp, lat: r.lat, lon: r.lon }),
            Err(_) if opts.skip_malformed => out.malformed += 1,
            Err((line, message)) => return Err(TraceError::Parse { path: path.to_path_buf(), line, message }),
        }
    }
    finish(out, path)
}

fn finish(mut out: Ingested, path: &Path) -> Result<Ingested, TraceError> {
    if out.records.is_empty() {
        return Err(TraceError::Empty { path: path.to_path_buf() });
    }
    let mut last: BTreeMap<&str, i64> = BTreeMap::new();
    for r in &out.records {
        if let Some(prev) = last.insert(&r.entity, r.timestamp) {
            if r.timestamp < prev {
                out.reordered += 1;
            }
        }
    }
    out.records.sort_by(|a, b| a.entity.cmp(&b.entity).then(a.timestamp.cmp(&b.timestamp)));
    Ok(out)
}

pub fn ingest(path: &Path, format: TraceFormat, opts: IngestOptions) -> Result<Ingested, TraceError> {
    match format {
        TraceFormat::Cabspotting => read_cabspotting_dir(path, opts),
        TraceFormat::Csv => read_csv(path, opts),
    }
}
