//! Labeled sample streams: synthetic drifting generators, file-backed
//! datasets, and chunk-level transforms.

pub mod transforms;

mod dataset;
mod synthetic;

pub use synthetic::{concept_mixture_weight, DriftType, SyntheticStreamSpec};

use std::path::Path;

use crate::chunk::{Chunk, Sample};
use crate::error::{CarError, Result};

/// Pull-based producer of labeled samples with ground-truth drift metadata.
///
/// The underlying sample sequence is fixed by the source definition; chunking
/// never changes which samples appear or their order.
#[derive(Debug, Clone)]
pub struct StreamSource {
    kind: SourceKind,
    cursor: usize,
    total: usize,
    n_features: usize,
    n_classes: usize,
    ground_truth_drifts: Vec<usize>,
    next_chunk_index: usize,
}

#[derive(Debug, Clone)]
enum SourceKind {
    Synthetic(Box<synthetic::SyntheticGen>),
    Dataset(Vec<Sample>),
}

impl StreamSource {
    /// Builds a deterministic synthetic stream from its spec.
    pub fn synthetic(spec: &SyntheticStreamSpec) -> Result<Self> {
        let gen = synthetic::SyntheticGen::new(spec)?;
        Ok(StreamSource {
            kind: SourceKind::Synthetic(Box::new(gen)),
            cursor: 0,
            total: spec.n_samples,
            n_features: spec.n_features,
            n_classes: spec.n_classes,
            ground_truth_drifts: spec.drift_centers(),
            next_chunk_index: 0,
        })
    }

    /// Loads a CSV dataset; drift positions may be supplied via a JSON sidecar
    /// holding an array of sample indices.
    pub fn from_csv(path: &Path, label_column: &str, drifts: Option<&Path>) -> Result<Self> {
        let (samples, n_features, n_classes) = dataset::load_csv(path, label_column)?;
        let ground_truth_drifts = match drifts {
            Some(p) => dataset::load_drift_sidecar(p)?,
            None => Vec::new(),
        };
        Ok(StreamSource {
            total: samples.len(),
            kind: SourceKind::Dataset(samples),
            cursor: 0,
            n_features,
            n_classes,
            ground_truth_drifts,
            next_chunk_index: 0,
        })
    }

    pub fn total_samples(&self) -> usize {
        self.total
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn remaining(&self) -> usize {
        self.total - self.cursor
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn ground_truth_drifts(&self) -> &[usize] {
        &self.ground_truth_drifts
    }

    /// Draws the next chunk of up to `requested_size` samples.
    ///
    /// Returns `Ok(None)` once the stream is exhausted; a shorter final chunk
    /// is returned when fewer samples remain.
    pub fn next_chunk(&mut self, requested_size: usize) -> Result<Option<Chunk>> {
        if requested_size < 1 {
            return Err(CarError::validation("requested_size", "must be >= 1"));
        }
        if self.remaining() == 0 {
            return Ok(None);
        }
        let take = requested_size.min(self.remaining());
        let samples = match &mut self.kind {
            SourceKind::Synthetic(gen) => {
                let start = self.cursor;
                (start..start + take).map(|i| gen.next_sample(i)).collect()
            }
            SourceKind::Dataset(samples) => samples[self.cursor..self.cursor + take].to_vec(),
        };
        self.cursor += take;
        let chunk = Chunk::new(samples, self.next_chunk_index);
        self.next_chunk_index += 1;
        Ok(Some(chunk))
    }
}
