use crate::chunk::Chunk;
use crate::error::{CarError, Result};

/// Binary decision tree with axis-aligned threshold splits chosen by Gini
/// impurity. Leaves store the class distribution of their training samples.
#[derive(Debug, Clone)]
pub struct CartModel {
    n_features: usize,
    n_classes: usize,
    nodes: Vec<Node>,
    depth: usize,
}

#[derive(Debug, Clone)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        distribution: Vec<f64>,
    },
}

pub(super) fn fit(chunk: &Chunk, max_depth: usize, min_split: usize) -> Result<CartModel> {
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
    let mut builder = Builder {
        chunk,
        n_features,
        n_classes,
        max_depth,
        min_split,
        nodes: Vec::new(),
        depth: 0,
    };
    let indices: Vec<usize> = (0..chunk.size()).collect();
    builder.grow(indices, 0);
    Ok(CartModel {
        n_features,
        n_classes,
        nodes: builder.nodes,
        depth: builder.depth,
    })
}

struct Builder<'a> {
    chunk: &'a Chunk,
    n_features: usize,
    n_classes: usize,
    max_depth: usize,
    min_split: usize,
    nodes: Vec<Node>,
    depth: usize,
}

impl Builder<'_> {
    fn grow(&mut self, indices: Vec<usize>, depth: usize) -> usize {
        self.depth = self.depth.max(depth);
        let counts = self.class_counts(&indices);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth || indices.len() < self.min_split {
            return self.push_leaf(&counts, indices.len());
        }
        match self.best_split(&indices) {
            None => self.push_leaf(&counts, indices.len()),
            Some((feature, threshold)) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                    .into_iter()
                    .partition(|&i| self.chunk.samples[i].features[feature] <= threshold);
                let node = self.nodes.len();
                self.nodes.push(Node::Leaf {
                    distribution: Vec::new(),
                }); // placeholder
                let left = self.grow(left_idx, depth + 1);
                let right = self.grow(right_idx, depth + 1);
                self.nodes[node] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                node
            }
        }
    }

    fn push_leaf(&mut self, counts: &[usize], total: usize) -> usize {
        let distribution = counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect();
        self.nodes.push(Node::Leaf { distribution });
        self.nodes.len() - 1
    }

    fn class_counts(&self, indices: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &i in indices {
            counts[self.chunk.samples[i].label] += 1;
        }
        counts
    }

    /// Lowest weighted child Gini impurity over all (feature, midpoint)
    /// candidates; the first candidate wins ties. `None` when every feature is
    /// constant over the node.
    fn best_split(&self, indices: &[usize]) -> Option<(usize, f64)> {
        let total = indices.len();
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in 0..self.n_features {
            let mut order: Vec<usize> = indices.to_vec();
            order.sort_by(|&a, &b| {
                self.chunk.samples[a].features[feature]
                    .partial_cmp(&self.chunk.samples[b].features[feature])
                    .expect("non-finite feature value")
            });
            let mut left_counts = vec![0usize; self.n_classes];
            let mut right_counts = self.class_counts(indices);
            for cut in 1..total {
                let moved = order[cut - 1];
                left_counts[self.chunk.samples[moved].label] += 1;
                right_counts[self.chunk.samples[moved].label] -= 1;
                let prev = self.chunk.samples[order[cut - 1]].features[feature];
                let next = self.chunk.samples[order[cut]].features[feature];
                if prev == next {
                    continue;
                }
                let score = weighted_gini(&left_counts, cut, &right_counts, total - cut);
                if best.is_none_or(|(b, _, _)| score < b) {
                    best = Some((score, feature, prev + (next - prev) / 2.0));
                }
            }
        }
        best.map(|(_, feature, threshold)| (feature, threshold))
    }
}

fn gini(counts: &[usize], total: usize) -> f64 {
    let total = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p
        })
        .sum::<f64>()
}

fn weighted_gini(left: &[usize], n_left: usize, right: &[usize], n_right: usize) -> f64 {
    let total = (n_left + n_right) as f64;
    (n_left as f64 * gini(left, n_left) + n_right as f64 * gini(right, n_right)) / total
}

impl CartModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Threshold of the root split, `None` when the tree is a single leaf.
    pub fn root_threshold(&self) -> Option<f64> {
        match self.nodes.first() {
            Some(Node::Split { threshold, .. }) => Some(*threshold),
            _ => None,
        }
    }

    pub fn classes_seen(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n_classes];
        for node in &self.nodes {
            if let Node::Leaf { distribution } = node {
                for (c, &p) in distribution.iter().enumerate() {
                    if p > 0.0 {
                        seen[c] = true;
                    }
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(c, _)| c)
            .collect()
    }

    pub(super) fn predict_proba(&self, features: &[f64]) -> Vec<f64> {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                Node::Leaf { distribution } => return distribution.clone(),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if features[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}
