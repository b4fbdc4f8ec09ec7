//! File formats.
//!
//! * Dataset: CSV with header `y,x1,...,xM`, one observation per row, plus an
//!   optional sidecar JSON `{"sigma": .., "truth": [..]}` stored next to it
//!   with the extension replaced by `.json`.
//! * Trace: CSV `step_index,time,coord_0,...,coord_{M-1}`.
//! * Estimate: JSON `{"estimate": [..], "diagnostics": {..}}`.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so output
//! is byte-for-byte reproducible.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::RegressionDataset;
use crate::sampler::TracePoint;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Vec<f64>>,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Reads a dataset CSV and, when present, its sidecar.
pub fn read_dataset(path: &Path) -> Result<RegressionDataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() || &headers[0] != "y" {
        return Err(parse_error(path, "first column must be `y`"));
    }
    let m = headers.len() - 1;
    if m == 0 {
        return Err(parse_error(path, "no predictor columns"));
    }
    for (j, name) in headers.iter().skip(1).enumerate() {
        if name != format!("x{}", j + 1) {
            return Err(parse_error(path, format!("column {} should be `x{}`, found `{name}`", j + 2, j + 1)));
        }
    }
    let mut responses = Vec::new();
    let mut data = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field
                .parse()
                .map_err(|_| parse_error(path, format!("row {}, column {}: not a number: `{field}`", row + 1, col + 1)))?;
            if col == 0 {
                responses.push(value);
            } else {
                data.push(value);
            }
        }
    }
    if responses.is_empty() {
        return Err(parse_error(path, "no observations"));
    }
    let design = Matrix::from_row_major(responses.len(), m, data)?;
    let mut dataset = RegressionDataset::new(design, responses)?;

    let side = sidecar_path(path);
    if side.exists() {
        let sidecar: Sidecar =
            serde_json::from_str(&fs::read_to_string(&side)?).map_err(|e| parse_error(&side, e.to_string()))?;
        if let Some(sigma) = sidecar.sigma {
            dataset = dataset.with_noise_level(sigma)?;
        }
        if let Some(truth) = sidecar.truth {
            dataset = dataset.with_truth(truth)?;
        }
    }
    Ok(dataset)
}

/// Writes the dataset CSV, and the sidecar when the dataset carries a noise
/// level or a truth.
pub fn write_dataset(path: &Path, dataset: &RegressionDataset) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let m = dataset.n_features();
    let mut header = Vec::with_capacity(m + 1);
    header.push("y".to_string());
    header.extend((1..=m).map(|j| format!("x{j}")));
    writer.write_record(&header)?;
    for (i, row) in dataset.design().row_iter().enumerate() {
        let mut record = Vec::with_capacity(m + 1);
        record.push(dataset.responses()[i].to_string());
        record.extend(row.iter().map(f64::to_string));
        writer.write_record(&record)?;
    }
    writer.flush()?;

    let sidecar = Sidecar {
        sigma: dataset.noise_level(),
        truth: dataset.truth().map(<[f64]>::to_vec),
    };
    if sidecar != Sidecar::default() {
        write_json(&sidecar_path(path), &sidecar)?;
    }
    Ok(())
}

pub fn write_trace(path: &Path, trace: &[TracePoint]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let m = trace.first().map_or(0, |p| p.coords.len());
    let mut header = vec!["step_index".to_string(), "time".to_string()];
    header.extend((0..m).map(|j| format!("coord_{j}")));
    writer.write_record(&header)?;
    for point in trace {
        let mut record = vec![point.step_index.to_string(), point.time.to_string()];
        record.extend(point.coords.iter().map(f64::to_string));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput<D> {
    pub estimate: Vec<f64>,
    pub diagnostics: D,
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
