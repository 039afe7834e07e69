//! Discrete Gaussian smoothing for accuracy curves.

use crate::error::{CarError, Result};

/// Convolves a series with a normalized Gaussian kernel truncated at
/// `4 * sigma`, using reflect padding at the boundaries. Output length equals
/// input length.
pub fn gaussian_smooth(series: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(CarError::validation("series", "must be non-empty"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(CarError::validation(
            "sigma",
            format!("must be finite and > 0, got {sigma}"),
        ));
    }
    let radius = (4.0 * sigma).floor() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|k| {
            let x = k as f64 / sigma;
            (-0.5 * x * x).exp()
        })
        .collect();
    let total: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= total;
    }

    let n = series.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0.0;
        for (j, &w) in kernel.iter().enumerate() {
            let idx = i as isize + j as isize - radius;
            acc += w * series[reflect_index(idx, n)];
        }
        out.push(acc);
    }
    Ok(out)
}

/// Maps an out-of-range index into `[0, n)` by edge-duplicating reflection:
/// the pattern for n = 4 is `... d c b a | a b c d | d c b a ...`.
fn reflect_index(idx: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let mut m = idx % period;
    if m < 0 {
        m += period;
    }
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_unchanged() {
        let series = vec![0.42; 25];
        let out = gaussian_smooth(&series, 1.0).unwrap();
        assert_eq!(out.len(), series.len());
        for v in out {
            assert!((v - 0.42).abs() < 1e-12);
        }
    }

    #[test]
    fn impulse_reproduces_the_kernel() {
        let mut series = vec![0.0; 21];
        series[10] = 1.0;
        let out = gaussian_smooth(&series, 1.0).unwrap();

        // Oracle: normalize direct density evaluations on the integer grid.
        let density: Vec<f64> = (-4..=4)
            .map(|k| (-0.5 * (k * k) as f64).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        let total: f64 = density.iter().sum();
        for (offset, &d) in (-4i32..=4).zip(&density) {
            let idx = (10 + offset) as usize;
            assert!(
                (out[idx] - d / total).abs() < 1e-12,
                "weight at offset {offset}"
            );
        }
        // Center weight matches the high-precision reference.
        assert!((out[10] - 0.398943469356097741).abs() < 1e-15);
    }

    #[test]
    fn output_length_matches_input() {
        for len in [1usize, 2, 5, 9] {
            let series: Vec<f64> = (0..len).map(|i| i as f64).collect();
            assert_eq!(gaussian_smooth(&series, 1.0).unwrap().len(), len);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gaussian_smooth(&[], 1.0).is_err());
        assert!(gaussian_smooth(&[1.0], 0.0).is_err());
        assert!(gaussian_smooth(&[1.0], -2.0).is_err());
    }

    #[test]
    fn reflection_pattern() {
        // n = 4: indices -1..-4 map to a b c d mirrored, 4..7 map back down.
        assert_eq!(reflect_index(-1, 4), 0);
        assert_eq!(reflect_index(-2, 4), 1);
        assert_eq!(reflect_index(-4, 4), 3);
        assert_eq!(reflect_index(4, 4), 3);
        assert_eq!(reflect_index(5, 4), 2);
        assert_eq!(reflect_index(7, 4), 0);
        assert_eq!(reflect_index(8, 4), 0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Smoothing preserves the mean of a constant-padded series.
            #[test]
            fn preserves_constant_mean(value in -10.0f64..10.0, len in 10usize..80) {
                let series = vec![value; len];
                let out = gaussian_smooth(&series, 1.0).unwrap();
                let mean = out.iter().sum::<f64>() / out.len() as f64;
                prop_assert!((mean - value).abs() < 1e-9);
            }

            // Output stays within the input range (kernel is a convex combination).
            #[test]
            fn output_within_input_bounds(
                series in proptest::collection::vec(0.0f64..=1.0, 1..60),
                sigma in 0.2f64..4.0,
            ) {
                let lo = series.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                for v in gaussian_smooth(&series, sigma).unwrap() {
                    prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
                }
            }
        }
    }
}
