//! Sample Restoration: how many samples a drift segment consumes before
//! accuracy regains a fraction of its post-minimum peak.

use crate::error::{CarError, Result};
use crate::evaluation::{segment_runs, RunRecord};

/// Result of the restoration scan over one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Restoration {
    /// Position of the accuracy minimum (first occurrence on ties).
    pub t_min: usize,
    /// Restoration threshold: `p * max accuracy at or after t_min`.
    pub threshold: f64,
    /// First position at or after `t_min` whose accuracy reaches the threshold.
    pub t_r: usize,
    /// Sum of chunk sizes from the segment start through `t_r` inclusive.
    pub samples: u64,
}

/// Scans one segment's per-chunk accuracies and sizes.
///
/// `restore_fraction` is the fraction `p` of the post-minimum peak accuracy
/// that must be regained, strictly between 0 and 1.
pub fn sample_restoration(
    accuracies: &[f64],
    sizes: &[usize],
    restore_fraction: f64,
) -> Result<Restoration> {
    if accuracies.is_empty() {
        return Err(CarError::validation("segment", "segment has no chunks"));
    }
    if accuracies.len() != sizes.len() {
        return Err(CarError::validation(
            "segment",
            format!(
                "accuracy and size lengths differ ({} vs {})",
                accuracies.len(),
                sizes.len()
            ),
        ));
    }
    if !(restore_fraction > 0.0 && restore_fraction < 1.0) {
        return Err(CarError::validation(
            "restore_fraction",
            format!("must be in (0, 1), got {restore_fraction}"),
        ));
    }

    let mut t_min = 0;
    for (t, &acc) in accuracies.iter().enumerate() {
        if acc < accuracies[t_min] {
            t_min = t;
        }
    }
    let peak = accuracies[t_min..]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = restore_fraction * peak;
    let t_r = (t_min..accuracies.len())
        .find(|&t| accuracies[t] >= threshold)
        .expect("the peak itself reaches the threshold");
    let samples = sizes[..=t_r].iter().map(|&s| s as u64).sum();
    Ok(Restoration {
        t_min,
        threshold,
        t_r,
        samples,
    })
}

/// Restoration of one drift segment within a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentRestoration {
    /// Trace position where the segment (drift detection) starts.
    pub segment_start: usize,
    /// Scan result with positions relative to the segment start.
    pub restoration: Restoration,
}

/// Per-run Sample Restoration report at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SrReport {
    pub restore_fraction: f64,
    pub segments: Vec<SegmentRestoration>,
    /// Mean of per-segment sample counts; NaN when no segment exists.
    pub mean: f64,
    /// Population standard deviation of per-segment counts; NaN when empty.
    pub std_dev: f64,
}

impl SrReport {
    pub fn sample_counts(&self) -> Vec<u64> {
        self.segments
            .iter()
            .map(|s| s.restoration.samples)
            .collect()
    }
}

/// Computes Sample Restoration for every drift segment of a run.
pub fn sr_report(record: &RunRecord, restore_fraction: f64) -> Result<SrReport> {
    let mut segments = Vec::new();
    for range in segment_runs(record) {
        let accuracies: Vec<f64> = record.traces[range.clone()]
            .iter()
            .map(|t| t.accuracy)
            .collect();
        let sizes: Vec<usize> = record.traces[range.clone()]
            .iter()
            .map(|t| t.chunk_size)
            .collect();
        let restoration = sample_restoration(&accuracies, &sizes, restore_fraction)?;
        segments.push(SegmentRestoration {
            segment_start: range.start,
            restoration,
        });
    }
    let (mean, std_dev) = if segments.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let values: Vec<f64> = segments
            .iter()
            .map(|s| s.restoration.samples as f64)
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
        (mean, var.sqrt())
    };
    Ok(SrReport {
        restore_fraction,
        segments,
        mean,
        std_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let acc = [0.9, 0.5, 0.6, 0.7, 0.85, 0.9];
        let sizes = [100; 6];
        let r = sample_restoration(&acc, &sizes, 0.9).unwrap();
        assert_eq!(r.t_min, 1);
        assert!((r.threshold - 0.81).abs() < 1e-12);
        assert_eq!(r.t_r, 4);
        assert_eq!(r.samples, 500);
    }

    #[test]
    fn constant_accuracy_restores_immediately() {
        let acc = [0.8; 7];
        let sizes = [50, 60, 70, 80, 90, 100, 110];
        let r = sample_restoration(&acc, &sizes, 0.7).unwrap();
        assert_eq!(r.t_min, 0);
        assert_eq!(r.t_r, 0);
        assert_eq!(r.samples, 50);
    }

    #[test]
    fn minimum_at_last_index_consumes_whole_segment() {
        let acc = [0.9, 0.8, 0.7, 0.6];
        let sizes = [10, 20, 30, 40];
        let r = sample_restoration(&acc, &sizes, 0.9).unwrap();
        assert_eq!(r.t_min, 3);
        assert_eq!(r.t_r, 3);
        assert_eq!(r.samples, 100);
    }

    #[test]
    fn argmin_takes_first_occurrence_on_ties() {
        let acc = [0.9, 0.4, 0.8, 0.4, 0.9];
        let sizes = [10; 5];
        let r = sample_restoration(&acc, &sizes, 0.5).unwrap();
        assert_eq!(r.t_min, 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(sample_restoration(&[], &[], 0.9).is_err());
        assert!(sample_restoration(&[0.5], &[10, 20], 0.9).is_err());
        assert!(sample_restoration(&[0.5], &[10], 0.0).is_err());
        assert!(sample_restoration(&[0.5], &[10], 1.0).is_err());
    }

    /// Exhaustive-scan oracle used to cross-check the implementation.
    fn oracle(acc: &[f64], sizes: &[usize], p: f64) -> (usize, f64, usize, u64) {
        let mut t_min = 0;
        for t in 0..acc.len() {
            if acc[t] < acc[t_min] {
                t_min = t;
            }
        }
        let mut peak = f64::NEG_INFINITY;
        for t in t_min..acc.len() {
            if acc[t] > peak {
                peak = acc[t];
            }
        }
        let r = p * peak;
        let mut t_r = t_min;
        while acc[t_r] < r {
            t_r += 1;
        }
        let mut total = 0u64;
        for &s in &sizes[..=t_r] {
            total += s as u64;
        }
        (t_min, r, t_r, total)
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn segment() -> impl Strategy<Value = (Vec<f64>, Vec<usize>)> {
            (1usize..50).prop_flat_map(|n| {
                (
                    proptest::collection::vec(0.0f64..=1.0, n),
                    proptest::collection::vec(1usize..2000, n),
                )
            })
        }

        proptest! {
            #[test]
            fn matches_exhaustive_oracle((acc, sizes) in segment(), p in 0.01f64..0.99) {
                let got = sample_restoration(&acc, &sizes, p).unwrap();
                let (t_min, r, t_r, total) = oracle(&acc, &sizes, p);
                prop_assert_eq!(got.t_min, t_min);
                prop_assert_eq!(got.threshold, r);
                prop_assert_eq!(got.t_r, t_r);
                prop_assert_eq!(got.samples, total);
            }

            // Raising the restoration fraction never lowers the sample count.
            #[test]
            fn monotone_in_restore_fraction(
                (acc, sizes) in segment(),
                p_lo in 0.01f64..0.98,
                bump in 0.001f64..0.5,
            ) {
                let p_hi = (p_lo + bump).min(0.99);
                let lo = sample_restoration(&acc, &sizes, p_lo).unwrap();
                let hi = sample_restoration(&acc, &sizes, p_hi).unwrap();
                prop_assert!(lo.samples <= hi.samples);
            }
        }
    }
}
