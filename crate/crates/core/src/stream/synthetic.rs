use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chunk::Sample;
use crate::error::{CarError, Result};

/// Distance of class centroids from the origin along each informative axis.
const CLASS_SEPARATION: f64 = 2.0;

/// Fraction of a concept segment occupied by a sigmoid transition.
const TRANSITION_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftType {
    /// Hard switch between concepts at the drift center.
    Abrupt,
    /// Samples drawn from the old or new concept with sigmoid-mixed odds.
    Gradual,
    /// Concept parameters interpolated continuously between old and new.
    Incremental,
}

/// Parameters of a synthetic drifting stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStreamSpec {
    pub n_samples: usize,
    pub n_classes: usize,
    pub n_features: usize,
    pub n_informative: usize,
    pub n_redundant: usize,
    pub n_drifts: usize,
    pub drift_type: DriftType,
    /// Alternate between two fixed concepts instead of drawing a fresh one per
    /// segment.
    pub recurring: bool,
    /// Steepness of the sigmoid used by gradual and incremental transitions.
    pub sigmoid_spacing: f64,
    pub seed: u64,
}

impl Default for SyntheticStreamSpec {
    fn default() -> Self {
        SyntheticStreamSpec {
            n_samples: 150_000,
            n_classes: 2,
            n_features: 20,
            n_informative: 2,
            n_redundant: 2,
            n_drifts: 5,
            drift_type: DriftType::Abrupt,
            recurring: false,
            sigmoid_spacing: 5.0,
            seed: 0,
        }
    }
}

impl SyntheticStreamSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(CarError::validation("n_samples", "must be > 0"));
        }
        if self.n_classes < 2 {
            return Err(CarError::validation("n_classes", "must be >= 2"));
        }
        if self.n_informative == 0 {
            return Err(CarError::validation("n_informative", "must be >= 1"));
        }
        if self.n_informative > 60 {
            return Err(CarError::validation("n_informative", "must be <= 60"));
        }
        if self.n_informative + self.n_redundant > self.n_features {
            return Err(CarError::validation(
                "n_features",
                format!(
                    "n_informative + n_redundant must not exceed n_features ({} + {} > {})",
                    self.n_informative, self.n_redundant, self.n_features
                ),
            ));
        }
        if !(self.sigmoid_spacing > 0.0) {
            return Err(CarError::validation("sigmoid_spacing", "must be > 0"));
        }
        Ok(())
    }

    /// Drift centers evenly spaced at `k * n_samples / (n_drifts + 1)`.
    pub fn drift_centers(&self) -> Vec<usize> {
        (1..=self.n_drifts)
            .map(|k| k * self.n_samples / (self.n_drifts + 1))
            .collect()
    }
}

/// Mixing weight of the incoming concept at `sample_index` for a transition
/// centered at `drift_center`.
///
/// Abrupt transitions step from 0 to 1 at the center. Gradual and incremental
/// transitions follow the logistic `1 / (1 + exp(-spacing * x))` with
/// `x = (sample_index - drift_center) / (transition_width / 2)`; the weight is
/// non-decreasing in the sample index.
pub fn concept_mixture_weight(
    sample_index: usize,
    drift_center: usize,
    transition_width: usize,
    spacing: f64,
    drift_type: DriftType,
) -> Result<f64> {
    match drift_type {
        DriftType::Abrupt => Ok(if sample_index < drift_center { 0.0 } else { 1.0 }),
        DriftType::Gradual | DriftType::Incremental => {
            if transition_width == 0 {
                return Err(CarError::validation(
                    "transition_width",
                    "must be > 0 for sigmoid transitions",
                ));
            }
            let x = (sample_index as f64 - drift_center as f64) / (transition_width as f64 / 2.0);
            Ok(1.0 / (1.0 + (-spacing * x).exp()))
        }
    }
}

/// One stationary concept: a centroid per class over the informative subspace
/// and the linear map producing the redundant features.
#[derive(Debug, Clone)]
struct Concept {
    centroids: Vec<Vec<f64>>,
    /// `mixing[redundant][informative]` coefficients.
    mixing: Vec<Vec<f64>>,
}

impl Concept {
    fn draw(rng: &mut ChaCha8Rng, spec: &SyntheticStreamSpec) -> Self {
        // Centroids sit on hypercube vertices, distinct across classes while
        // enough vertices exist.
        let vertex_space = 1u64.checked_shl(spec.n_informative as u32).unwrap_or(u64::MAX);
        let mut used: HashSet<u64> = HashSet::new();
        let mut centroids = Vec::with_capacity(spec.n_classes);
        for _ in 0..spec.n_classes {
            let mut vertex = 0u64;
            for attempt in 0..1000 {
                vertex = 0;
                for bit in 0..spec.n_informative {
                    if rng.random::<bool>() {
                        vertex |= 1 << bit;
                    }
                }
                if used.len() as u64 >= vertex_space || !used.contains(&vertex) || attempt == 999 {
                    break;
                }
            }
            used.insert(vertex);
            centroids.push(
                (0..spec.n_informative)
                    .map(|bit| {
                        if vertex >> bit & 1 == 1 {
                            CLASS_SEPARATION
                        } else {
                            -CLASS_SEPARATION
                        }
                    })
                    .collect(),
            );
        }
        let mixing = (0..spec.n_redundant)
            .map(|_| {
                (0..spec.n_informative)
                    .map(|_| rng.sample(StandardNormal))
                    .collect()
            })
            .collect();
        Concept { centroids, mixing }
    }

    fn lerp(a: &Concept, b: &Concept, weight: f64) -> Concept {
        let centroids = a
            .centroids
            .iter()
            .zip(&b.centroids)
            .map(|(ca, cb)| {
                ca.iter()
                    .zip(cb)
                    .map(|(&va, &vb)| (1.0 - weight) * va + weight * vb)
                    .collect()
            })
            .collect();
        let mixing = a
            .mixing
            .iter()
            .zip(&b.mixing)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(&va, &vb)| (1.0 - weight) * va + weight * vb)
                    .collect()
            })
            .collect();
        Concept { centroids, mixing }
    }
}

/// Lazy per-sample generator; consuming order is the only order.
#[derive(Debug, Clone)]
pub(super) struct SyntheticGen {
    spec: SyntheticStreamSpec,
    concepts: Vec<Concept>,
    centers: Vec<usize>,
    transition_width: usize,
    rng: ChaCha8Rng,
}

impl SyntheticGen {
    pub(super) fn new(spec: &SyntheticStreamSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let concept_count = if spec.recurring {
            2.min(spec.n_drifts + 1)
        } else {
            spec.n_drifts + 1
        };
        let concepts = (0..concept_count)
            .map(|_| Concept::draw(&mut rng, spec))
            .collect();
        let segment_len = spec.n_samples / (spec.n_drifts + 1);
        Ok(SyntheticGen {
            centers: spec.drift_centers(),
            transition_width: ((segment_len as f64 * TRANSITION_FRACTION) as usize).max(1),
            spec: spec.clone(),
            concepts,
            rng,
        })
    }

    fn concept_for_segment(&self, segment: usize) -> &Concept {
        if self.spec.recurring {
            &self.concepts[segment % 2]
        } else {
            &self.concepts[segment]
        }
    }

    /// Transition whose center lies closest to `index`; the later one wins
    /// exact-midpoint ties. Returns the 0-based transition ordinal.
    fn nearest_transition(&self, index: usize) -> usize {
        let next = self.centers.partition_point(|&c| c <= index);
        if next == 0 {
            return 0;
        }
        if next == self.centers.len() {
            return next - 1;
        }
        let prev_dist = index - self.centers[next - 1];
        let next_dist = self.centers[next] - index;
        if prev_dist < next_dist {
            next - 1
        } else {
            next
        }
    }

    pub(super) fn next_sample(&mut self, index: usize) -> Sample {
        let class = self.rng.random_range(0..self.spec.n_classes);
        let concept: Concept = if self.centers.is_empty() {
            self.concepts[0].clone()
        } else {
            match self.spec.drift_type {
                DriftType::Abrupt => {
                    let segment = self.centers.partition_point(|&c| c <= index);
                    self.concept_for_segment(segment).clone()
                }
                DriftType::Gradual => {
                    let k = self.nearest_transition(index);
                    let w = concept_mixture_weight(
                        index,
                        self.centers[k],
                        self.transition_width,
                        self.spec.sigmoid_spacing,
                        DriftType::Gradual,
                    )
                    .expect("validated spec");
                    let u: f64 = self.rng.random();
                    self.concept_for_segment(if u < w { k + 1 } else { k }).clone()
                }
                DriftType::Incremental => {
                    let k = self.nearest_transition(index);
                    let w = concept_mixture_weight(
                        index,
                        self.centers[k],
                        self.transition_width,
                        self.spec.sigmoid_spacing,
                        DriftType::Incremental,
                    )
                    .expect("validated spec");
                    Concept::lerp(
                        self.concept_for_segment(k),
                        self.concept_for_segment(k + 1),
                        w,
                    )
                }
            }
        };

        let n_noise = self.spec.n_features - self.spec.n_informative - self.spec.n_redundant;
        let mut features = Vec::with_capacity(self.spec.n_features);
        for f in 0..self.spec.n_informative {
            let noise: f64 = self.rng.sample(StandardNormal);
            features.push(concept.centroids[class][f] + noise);
        }
        for row in &concept.mixing {
            let value = row
                .iter()
                .zip(&features[..self.spec.n_informative])
                .map(|(&coef, &x)| coef * x)
                .sum();
            features.push(value);
        }
        for _ in 0..n_noise {
            features.push(self.rng.sample(StandardNormal));
        }
        Sample::new(features, class)
    }
}
