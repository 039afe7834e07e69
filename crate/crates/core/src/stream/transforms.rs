//! Chunk-level transforms: label-noise injection and minority oversampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chunk::Chunk;
use crate::error::{CarError, Result};

/// Flips the labels of exactly `floor(fraction * size)` distinct samples,
/// selected uniformly without replacement. Binary labels flip to the other
/// class; with more classes the new label is drawn uniformly from the others.
/// Features are untouched.
pub fn inject_label_noise(chunk: &Chunk, fraction: f64, rng: &mut impl Rng) -> Result<Chunk> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(CarError::validation(
            "fraction",
            format!("must be in [0, 1], got {fraction}"),
        ));
    }
    let count = floor_count(fraction, chunk.size());
    if count == 0 {
        return Ok(chunk.clone());
    }
    let n_classes = chunk.max_label().map_or(2, |m| (m + 1).max(2));
    let mut noisy = chunk.clone();
    for idx in rand::seq::index::sample(rng, chunk.size(), count) {
        let label = noisy.samples[idx].label;
        let offset = rng.random_range(1..n_classes);
        noisy.samples[idx].label = (label + offset) % n_classes;
    }
    Ok(noisy)
}

/// `floor(fraction * size)`, snapping products within 1e-9 of an integer to
/// that integer so decimal fractions like 0.3 * 10 count as 3.
fn floor_count(fraction: f64, size: usize) -> usize {
    let raw = fraction * size as f64;
    if (raw - raw.round()).abs() < 1e-9 {
        raw.round() as usize
    } else {
        raw.floor() as usize
    }
}

/// Resamples minority classes with replacement until every class matches the
/// majority count. The original samples stay in place as a prefix; copies are
/// appended grouped by ascending class.
pub fn oversample_chunk(chunk: &Chunk, rng: &mut impl Rng) -> Result<Chunk> {
    if chunk.is_empty() {
        return Err(CarError::validation("chunk", "cannot oversample an empty chunk"));
    }
    let counts = chunk.class_counts();
    let majority = *counts.values().max().expect("non-empty chunk");
    let mut balanced = chunk.clone();
    for (&class, &count) in &counts {
        if count == majority {
            continue;
        }
        let pool: Vec<usize> = chunk
            .samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label == class)
            .map(|(i, _)| i)
            .collect();
        for _ in 0..majority - count {
            let pick = pool[rng.random_range(0..pool.len())];
            balanced.samples.push(chunk.samples[pick].clone());
        }
    }
    Ok(balanced)
}

/// Per-run chunk pipeline: optional label noise followed by optional
/// oversampling, driven by a dedicated seeded generator.
#[derive(Debug, Clone)]
pub struct ChunkTransform {
    pub noise_fraction: f64,
    pub oversample: bool,
    rng: ChaCha8Rng,
}

impl ChunkTransform {
    pub fn new(noise_fraction: f64, oversample: bool, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&noise_fraction) {
            return Err(CarError::validation(
                "noise_fraction",
                format!("must be in [0, 1], got {noise_fraction}"),
            ));
        }
        Ok(ChunkTransform {
            noise_fraction,
            oversample,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.noise_fraction == 0.0 && !self.oversample
    }

    pub fn apply(&mut self, chunk: Chunk) -> Result<Chunk> {
        let chunk = if self.noise_fraction > 0.0 {
            inject_label_noise(&chunk, self.noise_fraction, &mut self.rng)?
        } else {
            chunk
        };
        if self.oversample {
            oversample_chunk(&chunk, &mut self.rng)
        } else {
            Ok(chunk)
        }
    }
}
