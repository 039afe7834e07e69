use std::collections::BTreeMap;

/// One labeled observation from a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: usize,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: usize) -> Self {
        Sample { features, label }
    }
}

/// A contiguous batch of samples, the unit of test-then-train processing.
///
/// `index` is the 0-based ordinal of the chunk within its stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub samples: Vec<Sample>,
    pub index: usize,
}

impl Chunk {
    pub fn new(samples: Vec<Sample>, index: usize) -> Self {
        Chunk { samples, index }
    }

    pub fn size(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Feature dimensionality, 0 for an empty chunk.
    pub fn n_features(&self) -> usize {
        self.samples.first().map_or(0, |s| s.features.len())
    }

    /// Number of samples per class, keyed by class index.
    pub fn class_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for sample in &self.samples {
            *counts.entry(sample.label).or_insert(0) += 1;
        }
        counts
    }

    /// Highest class index present, `None` for an empty chunk.
    pub fn max_label(&self) -> Option<usize> {
        self.samples.iter().map(|s| s.label).max()
    }
}
