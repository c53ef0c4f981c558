//! CSV data files and their JSON manifests.
//!
//! Numbers are written with 17 significant digits in scientific notation,
//! `.` as decimal separator and LF line endings. Every data file `<stem>.csv`
//! gets a sidecar `<stem>.manifest.json`; run metadata such as timings lives
//! only in the manifest so data files are reproducible byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::propagation::TrajectoryStats;
use crate::units::{RateOrigin, SimParams};

/// Formats a value for CSV output; NaN is written as `nan`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// A table destined for one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        self.rows
            .push(values.iter().map(|v| format_number(*v)).collect());
    }

    pub fn push_row(&mut self, values: Vec<String>) {
        self.rows.push(values);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// Writes `bytes` to `path` through a temporary file, so a failed run never
/// leaves a truncated file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    if let Err(e) = fs::write(&tmp, bytes) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Sidecar path `<stem>.manifest.json` of a data file.
pub fn manifest_path(data: &Path) -> PathBuf {
    let stem = data
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    data.with_file_name(format!("{stem}.manifest.json"))
}

/// One invariant check recorded in a manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.to_string(),
            passed: value <= limit,
            value,
            limit,
        }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.to_string(),
            passed: value >= limit,
            value,
            limit,
        }
    }
}

/// Standard per-trajectory invariant checks.
pub fn trajectory_checks(label: &str, stats: &TrajectoryStats) -> Vec<Check> {
    vec![
        Check::at_most(
            &format!("{label}: hermiticity drift"),
            stats.max_hermiticity_error,
            1e-10,
        ),
        Check::at_least(
            &format!("{label}: min eigenvalue"),
            stats.min_eigenvalue,
            -1e-8,
        ),
        Check::at_most(
            &format!("{label}: trace uptick"),
            stats.max_trace_uptick,
            1e-10,
        ),
    ]
}

/// Metadata accompanying one data file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub data_file: String,
    pub params: Value,
    pub rate_mode: Option<String>,
    pub frame: String,
    pub wall_clock_seconds: f64,
    pub checks: Vec<Check>,
    pub summary: Map<String, Value>,
    pub notes: Vec<String>,
}

/// Note attached to bias-derived runs describing the two rate conventions.
pub const RATE_MODE_NOTE: &str = "anchored mode fixes Γ_e(x=2) = 7.3e7 s⁻¹; the raw WKB formula \
     evaluated with ω_p/2π = 4.8 GHz gives Γ_e(x=2) ≈ 3.8e7 s⁻¹";

impl RunManifest {
    pub fn new(data_file: &Path, params: &SimParams, wall_clock_seconds: f64) -> Result<Self> {
        let mut notes = Vec::new();
        if !matches!(params.rate_origin, RateOrigin::Explicit) {
            notes.push(RATE_MODE_NOTE.to_string());
        }
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            data_file: data_file
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            params: serde_json::to_value(params)?,
            rate_mode: params.rate_origin.mode().map(|m| m.as_str().to_string()),
            frame: params.frame.as_str().to_string(),
            wall_clock_seconds,
            checks: Vec::new(),
            summary: Map::new(),
            notes,
        })
    }

    pub fn summary_value(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.summary
            .insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }
}

/// Writes a table and its manifest next to each other.
pub fn write_with_manifest(path: &Path, table: &Table, manifest: &RunManifest) -> Result<()> {
    write_atomic(path, &table.to_bytes()?)?;
    let json = serde_json::to_vec_pretty(manifest)?;
    write_atomic(&manifest_path(path), &json)
}
