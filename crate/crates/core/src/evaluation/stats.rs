//! One-sided Wilcoxon signed-rank test for paired samples.
//!
//! Tests H1: `x < y` element-wise. Zero differences are dropped, absolute
//! differences receive average ranks on ties, and the statistic is the rank
//! sum of the positive differences (small when H1 holds). The null
//! distribution is enumerated exactly for up to 25 pairs; beyond that a
//! normal approximation with tie correction is used.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{CarError, Result};

const MIN_PAIRS: usize = 5;
const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonOutcome {
    /// Rank sum of positive differences.
    pub statistic: f64,
    /// One-sided p-value for H1: x < y.
    pub p_value: f64,
    /// Pairs remaining after dropping zero differences.
    pub n_used: usize,
}

pub fn wilcoxon_one_sided_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonOutcome> {
    if x.len() != y.len() {
        return Err(CarError::validation(
            "pairs",
            format!("sample lengths differ ({} vs {})", x.len(), y.len()),
        ));
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(CarError::InsufficientPairs {
            required: MIN_PAIRS,
            available: n,
        });
    }

    let ranks = average_ranks(&diffs);
    let w_pos: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();

    let p_value = if n <= EXACT_LIMIT {
        exact_p(&ranks, w_pos)
    } else {
        normal_p(&ranks, w_pos, n)
    };
    Ok(WilcoxonOutcome {
        statistic: w_pos,
        p_value,
        n_used: n,
    })
}

/// Ascending ranks of |d| with average ranks over tied runs.
fn average_ranks(diffs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&a, &b| {
        diffs[a]
            .abs()
            .partial_cmp(&diffs[b].abs())
            .expect("finite differences")
    });
    let mut ranks = vec![0.0; diffs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // Positions i..=j (0-based) share the average of ranks i+1..=j+1.
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Exact tail probability P(W+ <= observed) under the sign-flip null.
///
/// Ranks are doubled to integers (ties produce half-ranks) and the subset-sum
/// distribution is built by dynamic programming; subset counts fit u64 well
/// beyond 25 pairs.
fn exact_p(ranks: &[f64], w_pos: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let observed = (2.0 * w_pos).round() as usize;
    let favorable: u64 = counts[..=observed.min(total)].iter().sum();
    favorable as f64 / 2f64.powi(ranks.len() as i32)
}

/// Normal approximation with tie correction, no continuity correction.
fn normal_p(ranks: &[f64], w_pos: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
    // Group tied ranks: a run of t equal ranks subtracts (t^3 - t) / 48.
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite ranks"));
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        variance -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    let z = (w_pos - mean) / variance.sqrt();
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .cdf(z)
}
