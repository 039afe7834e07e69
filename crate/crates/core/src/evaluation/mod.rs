//! Test-then-train evaluation: drives a stream through an ensemble with drift
//! and stabilization detection, records per-chunk traces, and derives
//! restoration statistics from them.

mod restoration;
mod smoothing;
mod stats;
mod trace_io;

pub use restoration::{sample_restoration, sr_report, Restoration, SegmentRestoration, SrReport};
pub use smoothing::gaussian_smooth;
pub use stats::{wilcoxon_one_sided_signed_rank, WilcoxonOutcome};
pub use trace_io::{read_trace_csv, write_trace_csv};

use std::ops::Range;

use crate::detectors::{DriftSignal, Fhddm, StabilizationSignal, StabilizationWindow};
use crate::ensemble::EnsembleModel;
use crate::error::{CarError, Result};
use crate::scheduler::SchedulerState;
use crate::stream::transforms::ChunkTransform;
use crate::stream::StreamSource;

/// Per-chunk record of a run: realized size, accuracy before training, and the
/// detector signals raised while testing it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkTrace {
    pub chunk_index: usize,
    pub chunk_size: usize,
    pub accuracy: f64,
    pub drift_detected: bool,
    pub stabilization_detected: bool,
    /// Samples consumed from the stream so far, including the train-only
    /// warm-up chunk.
    pub cumulative_samples: u64,
}

/// Full trace of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub car_enabled: bool,
    pub ground_truth_drifts: Vec<usize>,
    pub traces: Vec<ChunkTrace>,
}

/// Runs the test-then-train protocol over a stream.
///
/// The first chunk only trains (an untrained ensemble cannot be scored). Every
/// later chunk is scored sample-by-sample — outcomes feed the drift detector,
/// the chunk accuracy feeds the stabilization window — then the next chunk
/// size is taken from the scheduler (the fixed base size when `car_enabled` is
/// false), and finally the chunk is trained on. A detected drift clears the
/// stabilization window. The loop stops before a trailing partial chunk, so
/// every traced chunk has exactly the size the schedule requested.
pub fn test_then_train_run(
    stream: &mut StreamSource,
    ensemble: &mut EnsembleModel,
    drift_detector: &mut Fhddm,
    stabilization: &mut StabilizationWindow,
    scheduler: &mut SchedulerState,
    car_enabled: bool,
    mut transform: Option<&mut ChunkTransform>,
) -> Result<RunRecord> {
    if stream.remaining() == 0 {
        return Err(CarError::validation("stream", "stream is empty"));
    }
    let base_size = scheduler.config().base_chunk_size;
    let mut next_size = scheduler.current_size();

    let first = stream
        .next_chunk(next_size)?
        .expect("checked non-empty stream");
    let first = match transform.as_deref_mut() {
        Some(t) => t.apply(first)?,
        None => first,
    };
    let mut cumulative = first.size() as u64;
    ensemble.process_chunk(&first)?;

    let mut traces = Vec::new();
    while stream.remaining() >= next_size {
        let chunk = stream
            .next_chunk(next_size)?
            .expect("remaining checked above");
        let chunk = match transform.as_deref_mut() {
            Some(t) => t.apply(chunk)?,
            None => chunk,
        };

        let mut correct = 0usize;
        let mut drift = false;
        for sample in &chunk.samples {
            let outcome = ensemble.predict(&sample.features)? == sample.label;
            if outcome {
                correct += 1;
            }
            if drift_detector.update(outcome) == DriftSignal::Drift {
                drift = true;
            }
        }
        let accuracy = correct as f64 / chunk.size() as f64;
        let stabilized = stabilization.update(accuracy)? == StabilizationSignal::Stabilized;
        if drift {
            stabilization.reset();
        }

        cumulative += chunk.size() as u64;
        traces.push(ChunkTrace {
            chunk_index: chunk.index,
            chunk_size: chunk.size(),
            accuracy,
            drift_detected: drift,
            stabilization_detected: stabilized,
            cumulative_samples: cumulative,
        });

        next_size = if car_enabled {
            scheduler.next_chunk_size(drift, stabilized)
        } else {
            base_size
        };

        ensemble.process_chunk(&chunk)?;
    }

    Ok(RunRecord {
        car_enabled,
        ground_truth_drifts: stream.ground_truth_drifts().to_vec(),
        traces,
    })
}

/// Splits a run into drift segments: each detected drift opens an interval of
/// trace positions that closes at the next detection or at the end of the
/// record. Traces before the first detection belong to no segment.
pub fn segment_runs(record: &RunRecord) -> Vec<Range<usize>> {
    let starts: Vec<usize> = record
        .traces
        .iter()
        .enumerate()
        .filter(|(_, t)| t.drift_detected)
        .map(|(i, _)| i)
        .collect();
    starts
        .iter()
        .enumerate()
        .map(|(k, &start)| {
            let end = starts.get(k + 1).copied().unwrap_or(record.traces.len());
            start..end
        })
        .collect()
}
