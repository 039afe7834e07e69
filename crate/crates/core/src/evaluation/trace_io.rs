//! CSV persistence for run traces.
//!
//! Layout: one row per tested chunk with columns `run_id, chunk_index,
//! chunk_size, accuracy, drift_detected, stabilization_detected,
//! cumulative_samples`.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CarError, Result};
use crate::evaluation::{ChunkTrace, RunRecord};

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    run_id: String,
    chunk_index: usize,
    chunk_size: usize,
    accuracy: f64,
    drift_detected: bool,
    stabilization_detected: bool,
    cumulative_samples: u64,
}

pub fn write_trace_csv(path: &Path, run_id: &str, record: &RunRecord) -> Result<()> {
    let mut writer = csv::Writer::from_writer(File::create(path)?);
    for trace in &record.traces {
        writer
            .serialize(TraceRow {
                run_id: run_id.to_string(),
                chunk_index: trace.chunk_index,
                chunk_size: trace.chunk_size,
                accuracy: trace.accuracy,
                drift_detected: trace.drift_detected,
                stabilization_detected: trace.stabilization_detected,
                cumulative_samples: trace.cumulative_samples,
            })
            .map_err(|e| trace_error(path, e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a trace file back, returning its run id and chunk traces.
pub fn read_trace_csv(path: &Path) -> Result<(String, Vec<ChunkTrace>)> {
    let mut reader = csv::Reader::from_reader(File::open(path)?);
    let mut run_id: Option<String> = None;
    let mut traces = Vec::new();
    for row in reader.deserialize() {
        let row: TraceRow = row.map_err(|e| trace_error(path, e.to_string()))?;
        match &run_id {
            None => run_id = Some(row.run_id.clone()),
            Some(existing) if *existing != row.run_id => {
                return Err(trace_error(
                    path,
                    format!("mixed run ids {existing:?} and {:?}", row.run_id),
                ));
            }
            _ => {}
        }
        traces.push(ChunkTrace {
            chunk_index: row.chunk_index,
            chunk_size: row.chunk_size,
            accuracy: row.accuracy,
            drift_detected: row.drift_detected,
            stabilization_detected: row.stabilization_detected,
            cumulative_samples: row.cumulative_samples,
        });
    }
    let run_id = run_id.ok_or_else(|| trace_error(path, "no trace rows".to_string()))?;
    Ok((run_id, traces))
}

fn trace_error(path: &Path, message: impl Into<String>) -> CarError {
    CarError::TraceFormat {
        path: path.display().to_string(),
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> RunRecord {
        RunRecord {
            car_enabled: true,
            ground_truth_drifts: vec![500],
            traces: vec![
                ChunkTrace {
                    chunk_index: 1,
                    chunk_size: 100,
                    accuracy: 0.9375,
                    drift_detected: false,
                    stabilization_detected: false,
                    cumulative_samples: 200,
                },
                ChunkTrace {
                    chunk_index: 2,
                    chunk_size: 30,
                    accuracy: 0.5,
                    drift_detected: true,
                    stabilization_detected: false,
                    cumulative_samples: 230,
                },
            ],
        }
    }

    #[test]
    fn roundtrip_preserves_traces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        let record = sample_record();
        write_trace_csv(&path, "demo-run", &record).unwrap();

        let (run_id, traces) = read_trace_csv(&path).unwrap();
        assert_eq!(run_id, "demo-run");
        assert_eq!(traces, record.traces);

        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "run_id,chunk_index,chunk_size,accuracy,drift_detected,stabilization_detected,cumulative_samples"
        );
        assert_eq!(lines.next().unwrap(), "demo-run,1,100,0.9375,false,false,200");
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        let record = sample_record();
        write_trace_csv(&a, "r", &record).unwrap();
        write_trace_csv(&b, "r", &record).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn empty_or_malformed_files_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "run_id,chunk_index\n").unwrap();
        assert!(read_trace_csv(&path).is_err());
    }
}
