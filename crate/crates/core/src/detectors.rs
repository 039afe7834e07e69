//! Drift detection over per-sample outcomes and stabilization detection over
//! per-chunk scores.
//!
//! The drift detector tracks the fraction of correct predictions in a sliding
//! window and signals when it falls more than a Hoeffding bound below the best
//! fraction seen since the last reset. The stabilization detector watches the
//! variance of recent chunk scores.

use std::collections::VecDeque;

use crate::error::{CarError, Result};

/// Hoeffding bound `sqrt(ln(1/delta) / (2n))` for a window of `n` outcomes.
pub fn hoeffding_bound(n: usize, delta: f64) -> Result<f64> {
    if n < 1 {
        return Err(CarError::validation("n", "window length must be >= 1"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(CarError::validation(
            "delta",
            format!("must be in (0, 1], got {delta}"),
        ));
    }
    Ok(((1.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftSignal {
    NoDrift,
    Drift,
}

/// Sliding-window drift detector over boolean prediction outcomes.
///
/// Emits [`DriftSignal::Drift`] once the windowed accuracy drops more than
/// `epsilon` below the maximum windowed accuracy observed since the last
/// reset. The window and the maximum are cleared on detection.
#[derive(Debug, Clone)]
pub struct Fhddm {
    window: VecDeque<bool>,
    capacity: usize,
    correct: usize,
    p_max: f64,
    epsilon: f64,
}

impl Fhddm {
    pub fn new(window_len: usize, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(CarError::validation(
                "delta",
                format!("must be in (0, 1), got {delta}"),
            ));
        }
        let epsilon = hoeffding_bound(window_len, delta)?;
        Ok(Fhddm {
            window: VecDeque::with_capacity(window_len),
            capacity: window_len,
            correct: 0,
            p_max: 0.0,
            epsilon,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn window_len(&self) -> usize {
        self.capacity
    }

    /// Pushes one prediction outcome and reports whether drift was detected.
    ///
    /// No signal is possible until the window has filled once.
    pub fn update(&mut self, correct: bool) -> DriftSignal {
        if self.window.len() == self.capacity {
            if let Some(evicted) = self.window.pop_front() {
                if evicted {
                    self.correct -= 1;
                }
            }
        }
        self.window.push_back(correct);
        if correct {
            self.correct += 1;
        }
        if self.window.len() < self.capacity {
            return DriftSignal::NoDrift;
        }
        let p = self.correct as f64 / self.capacity as f64;
        if p > self.p_max {
            self.p_max = p;
        }
        if self.p_max - p > self.epsilon {
            self.reset();
            DriftSignal::Drift
        } else {
            DriftSignal::NoDrift
        }
    }

    /// Clears the window and the tracked maximum.
    pub fn reset(&mut self) {
        self.window.clear();
        self.correct = 0;
        self.p_max = 0.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizationSignal {
    NotStabilized,
    Stabilized,
}

/// Variance-based stabilization detector over per-chunk scores.
///
/// Holds the last `capacity` scores; stabilization is signaled when the
/// window is full and the population variance of its scores falls below
/// `threshold`. A threshold of 0 never signals, which disables the detector.
#[derive(Debug, Clone)]
pub struct StabilizationWindow {
    scores: VecDeque<f64>,
    capacity: usize,
    threshold: f64,
}

impl StabilizationWindow {
    pub fn new(capacity: usize, threshold: f64) -> Result<Self> {
        if capacity < 2 {
            return Err(CarError::validation("capacity", "must be >= 2"));
        }
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(CarError::validation(
                "threshold",
                format!("must be finite and >= 0, got {threshold}"),
            ));
        }
        Ok(StabilizationWindow {
            scores: VecDeque::with_capacity(capacity),
            capacity,
            threshold,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.scores.len() == self.capacity
    }

    /// Population variance of the window, `None` until the window is full.
    pub fn variance(&self) -> Option<f64> {
        if !self.is_full() {
            return None;
        }
        let n = self.scores.len() as f64;
        let mean = self.scores.iter().sum::<f64>() / n;
        let var = self.scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        Some(var)
    }

    /// Pushes a score in `[0, 1]` and reports the stabilization state.
    pub fn update(&mut self, score: f64) -> Result<StabilizationSignal> {
        if !(0.0..=1.0).contains(&score) {
            return Err(CarError::validation(
                "score",
                format!("must be in [0, 1], got {score}"),
            ));
        }
        if self.scores.len() == self.capacity {
            self.scores.pop_front();
        }
        self.scores.push_back(score);
        match self.variance() {
            Some(var) if var < self.threshold => Ok(StabilizationSignal::Stabilized),
            _ => Ok(StabilizationSignal::NotStabilized),
        }
    }

    pub fn reset(&mut self) {
        self.scores.clear();
    }
}
