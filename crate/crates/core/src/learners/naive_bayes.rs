use crate::chunk::Chunk;
use crate::error::{CarError, Result};

/// Gaussian naive Bayes with per-class feature means and floored variances.
///
/// Likelihoods are evaluated in log space and normalized with a max shift, so
/// 20-feature products cannot underflow the posterior.
#[derive(Debug, Clone)]
pub struct GaussianNbModel {
    n_features: usize,
    priors: Vec<f64>,
    /// `means[class][feature]`, zero-filled for classes absent from training.
    means: Vec<Vec<f64>>,
    vars: Vec<Vec<f64>>,
}

pub(super) fn fit(chunk: &Chunk, variance_floor_mult: f64) -> Result<GaussianNbModel> {
    let n_features = chunk.n_features();
    if n_features == 0 {
        return Err(CarError::validation("chunk", "samples carry no features"));
    }
    for (i, sample) in chunk.samples.iter().enumerate() {
        if sample.features.len() != n_features {
            return Err(CarError::validation(
                "chunk",
                format!(
                    "sample {i} has {} features, expected {n_features}",
                    sample.features.len()
                ),
            ));
        }
    }
    let n_classes = chunk.max_label().unwrap_or(0) + 1;
    let total = chunk.size() as f64;

    let mut counts = vec![0usize; n_classes];
    let mut means = vec![vec![0.0f64; n_features]; n_classes];
    for sample in &chunk.samples {
        counts[sample.label] += 1;
        for (f, &x) in sample.features.iter().enumerate() {
            means[sample.label][f] += x;
        }
    }
    for class in 0..n_classes {
        if counts[class] > 0 {
            for m in &mut means[class] {
                *m /= counts[class] as f64;
            }
        }
    }

    let mut vars = vec![vec![0.0f64; n_features]; n_classes];
    for sample in &chunk.samples {
        for (f, &x) in sample.features.iter().enumerate() {
            let d = x - means[sample.label][f];
            vars[sample.label][f] += d * d;
        }
    }
    for class in 0..n_classes {
        if counts[class] > 0 {
            for v in &mut vars[class] {
                *v /= counts[class] as f64;
            }
        }
    }

    // Floor relative to the largest per-feature variance over the whole chunk,
    // never below the bare multiplier.
    let mut grand_means = vec![0.0f64; n_features];
    for sample in &chunk.samples {
        for (f, &x) in sample.features.iter().enumerate() {
            grand_means[f] += x;
        }
    }
    for m in &mut grand_means {
        *m /= total;
    }
    let mut max_var: f64 = 0.0;
    for f in 0..n_features {
        let mut v = 0.0;
        for sample in &chunk.samples {
            let d = sample.features[f] - grand_means[f];
            v += d * d;
        }
        max_var = max_var.max(v / total);
    }
    let floor = variance_floor_mult * max_var.max(1.0);
    for class_vars in &mut vars {
        for v in class_vars {
            if *v < floor {
                *v = floor;
            }
        }
    }

    let priors = counts.iter().map(|&c| c as f64 / total).collect();
    Ok(GaussianNbModel {
        n_features,
        priors,
        means,
        vars,
    })
}

impl GaussianNbModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.priors.len()
    }

    pub fn classes_seen(&self) -> Vec<usize> {
        self.priors
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn mean(&self, class: usize, feature: usize) -> f64 {
        self.means[class][feature]
    }

    pub fn variance(&self, class: usize, feature: usize) -> f64 {
        self.vars[class][feature]
    }

    pub(super) fn predict_proba(&self, features: &[f64]) -> Vec<f64> {
        let mut log_joint = vec![f64::NEG_INFINITY; self.n_classes()];
        for class in 0..self.n_classes() {
            if self.priors[class] == 0.0 {
                continue;
            }
            let mut ll = self.priors[class].ln();
            for (f, &x) in features.iter().enumerate() {
                let var = self.vars[class][f];
                let d = x - self.means[class][f];
                ll -= 0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var);
            }
            log_joint[class] = ll;
        }
        let max = log_joint.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = log_joint.iter().map(|&l| (l - max).exp()).collect();
        let sum: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= sum;
        }
        probs
    }
}
