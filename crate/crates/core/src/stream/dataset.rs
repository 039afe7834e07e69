use std::fs::File;
use std::path::Path;

use crate::chunk::Sample;
use crate::error::{CarError, Result};

/// Reads a labeled dataset from a headered CSV file.
///
/// Every column except `label_column` is parsed as a decimal feature, in
/// header order; the label column must hold non-negative integers. Returns
/// the samples in file order together with the inferred feature and class
/// counts.
pub(super) fn load_csv(path: &Path, label_column: &str) -> Result<(Vec<Sample>, usize, usize)> {
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| csv_error(&e))?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| {
            CarError::validation(
                "label_column",
                format!("column {label_column:?} not found in header"),
            )
        })?;
    let n_features = headers.len() - 1;
    if n_features == 0 {
        return Err(CarError::validation(
            "path",
            "dataset has no feature columns",
        ));
    }

    let mut samples = Vec::new();
    let mut max_label = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(samples.len() as u64 + 2);
        if record.len() != headers.len() {
            return Err(CarError::DatasetParse {
                line,
                message: format!("expected {} columns, found {}", headers.len(), record.len()),
            });
        }
        let mut features = Vec::with_capacity(n_features);
        let mut label = 0usize;
        for (col, field) in record.iter().enumerate() {
            if col == label_idx {
                label = field.trim().parse::<usize>().map_err(|_| CarError::DatasetParse {
                    line,
                    message: format!("label {field:?} is not a non-negative integer"),
                })?;
            } else {
                let value = field.trim().parse::<f64>().map_err(|_| CarError::DatasetParse {
                    line,
                    message: format!("feature {field:?} in column {:?} is not numeric", &headers[col]),
                })?;
                features.push(value);
            }
        }
        max_label = max_label.max(label);
        samples.push(Sample::new(features, label));
    }
    if samples.is_empty() {
        return Err(CarError::validation("path", "dataset contains no rows"));
    }
    Ok((samples, n_features, max_label + 1))
}

fn csv_error(err: &csv::Error) -> CarError {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    CarError::DatasetParse {
        line,
        message: err.to_string(),
    }
}

/// Reads a drift-position sidecar: a JSON array of sample indices.
pub(super) fn load_drift_sidecar(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)?;
    let drifts: Vec<usize> = serde_json::from_str(&text).map_err(|e| {
        CarError::validation("drifts", format!("sidecar {path:?} is not a JSON array of indices: {e}"))
    })?;
    Ok(drifts)
}
