//! Batch-trainable base classifiers: Gaussian naive Bayes and a CART-style
//! decision tree. One model is trained per chunk and never updated after.

mod cart;
mod naive_bayes;

pub use cart::CartModel;
pub use naive_bayes::GaussianNbModel;

use serde::{Deserialize, Serialize};

use crate::chunk::Chunk;
use crate::error::{CarError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    GaussianNb,
    Cart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    /// Maximum tree depth for CART; the root sits at depth 0.
    pub cart_max_depth: usize,
    /// Minimum node size eligible for splitting.
    pub cart_min_split: usize,
    /// Variance-floor multiplier for naive Bayes; the effective floor is
    /// `nb_variance_floor * max(1, largest per-feature variance in the chunk)`.
    pub nb_variance_floor: f64,
}

impl LearnerSpec {
    pub fn gaussian_nb() -> Self {
        LearnerSpec {
            kind: LearnerKind::GaussianNb,
            ..Self::defaults()
        }
    }

    pub fn cart() -> Self {
        LearnerSpec {
            kind: LearnerKind::Cart,
            ..Self::defaults()
        }
    }

    fn defaults() -> Self {
        LearnerSpec {
            kind: LearnerKind::GaussianNb,
            cart_max_depth: 8,
            cart_min_split: 2,
            nb_variance_floor: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cart_max_depth < 1 {
            return Err(CarError::validation("cart_max_depth", "must be >= 1"));
        }
        if self.cart_min_split < 2 {
            return Err(CarError::validation("cart_min_split", "must be >= 2"));
        }
        if !(self.nb_variance_floor > 0.0) {
            return Err(CarError::validation("nb_variance_floor", "must be > 0"));
        }
        Ok(())
    }
}

/// A fitted base classifier. Immutable after training.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    GaussianNb(GaussianNbModel),
    Cart(CartModel),
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::GaussianNb(m) => m.n_features(),
            TrainedModel::Cart(m) => m.n_features(),
        }
    }

    /// Number of class slots in probability outputs (highest label seen + 1).
    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::GaussianNb(m) => m.n_classes(),
            TrainedModel::Cart(m) => m.n_classes(),
        }
    }

    /// Class indices that occurred in the training chunk.
    pub fn classes_seen(&self) -> Vec<usize> {
        match self {
            TrainedModel::GaussianNb(m) => m.classes_seen(),
            TrainedModel::Cart(m) => m.classes_seen(),
        }
    }

    /// Class probabilities; non-negative, summing to 1.
    pub fn predict_proba(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_features(features)?;
        Ok(match self {
            TrainedModel::GaussianNb(m) => m.predict_proba(features),
            TrainedModel::Cart(m) => m.predict_proba(features),
        })
    }

    /// Most probable class; ties break toward the lowest class index.
    pub fn predict(&self, features: &[f64]) -> Result<usize> {
        let probs = self.predict_proba(features)?;
        Ok(argmax_lowest(&probs))
    }

    /// Probability assigned to `class`, 0 for classes beyond the model's range.
    pub fn proba_of(&self, features: &[f64], class: usize) -> Result<f64> {
        let probs = self.predict_proba(features)?;
        Ok(probs.get(class).copied().unwrap_or(0.0))
    }

    fn check_features(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.n_features() {
            return Err(CarError::validation(
                "features",
                format!(
                    "dimension mismatch: model expects {}, got {}",
                    self.n_features(),
                    features.len()
                ),
            ));
        }
        Ok(())
    }
}

/// Trains one base classifier on a chunk.
pub fn fit_batch(spec: &LearnerSpec, chunk: &Chunk) -> Result<TrainedModel> {
    spec.validate()?;
    if chunk.is_empty() {
        return Err(CarError::validation("chunk", "cannot fit on an empty chunk"));
    }
    match spec.kind {
        LearnerKind::GaussianNb => Ok(TrainedModel::GaussianNb(naive_bayes::fit(
            chunk,
            spec.nb_variance_floor,
        )?)),
        LearnerKind::Cart => Ok(TrainedModel::Cart(cart::fit(
            chunk,
            spec.cart_max_depth,
            spec.cart_min_split,
        )?)),
    }
}

/// Index of the largest value, first index on ties.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
