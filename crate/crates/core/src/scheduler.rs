//! Adaptive chunk-size schedule: shrink to the drift size on detected drift,
//! regrow geometrically, snap back to the base size on stabilization.

use serde::{Deserialize, Serialize};

use crate::error::{CarError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    /// Base chunk size used while the stream is stable.
    pub base_chunk_size: usize,
    /// Chunk size applied immediately after a detected drift.
    pub drift_chunk_size: usize,
    /// Geometric growth factor, strictly greater than 1.
    pub alpha: f64,
}

impl SchedulerConfig {
    pub fn new(base_chunk_size: usize, drift_chunk_size: usize, alpha: f64) -> Result<Self> {
        let config = SchedulerConfig {
            base_chunk_size,
            drift_chunk_size,
            alpha,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.drift_chunk_size < 1 {
            return Err(CarError::validation("drift_chunk_size", "must be >= 1"));
        }
        if self.drift_chunk_size > self.base_chunk_size {
            return Err(CarError::validation(
                "drift_chunk_size",
                format!(
                    "must not exceed base_chunk_size ({} > {})",
                    self.drift_chunk_size, self.base_chunk_size
                ),
            ));
        }
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(CarError::validation(
                "alpha",
                format!("must be finite and > 1, got {}", self.alpha),
            ));
        }
        Ok(())
    }
}

/// Mutable schedule state, one per run loop.
#[derive(Debug, Clone)]
pub struct SchedulerState {
    config: SchedulerConfig,
    current_size: usize,
}

impl SchedulerState {
    /// Starts at the base chunk size.
    pub fn new(config: SchedulerConfig) -> Result<Self> {
        config.validate()?;
        let current_size = config.base_chunk_size;
        Ok(SchedulerState {
            config,
            current_size,
        })
    }

    pub fn config(&self) -> &SchedulerConfig {
        &self.config
    }

    pub fn current_size(&self) -> usize {
        self.current_size
    }

    /// Advances the schedule one step and returns the next chunk size.
    ///
    /// Stabilization snaps to the base size, otherwise the size grows by
    /// `floor(alpha * current)` capped at the base size; a detected drift
    /// overrides both and resets to the drift size. When the floored growth
    /// would stall (possible only for very small sizes), the size advances by
    /// one sample instead. The result always lies in
    /// `[drift_chunk_size, base_chunk_size]`.
    pub fn next_chunk_size(&mut self, drift_detected: bool, stabilization_detected: bool) -> usize {
        let base = self.config.base_chunk_size;
        let mut next = if stabilization_detected {
            base
        } else {
            let grown = (self.config.alpha * self.current_size as f64).floor() as usize;
            let grown = if grown <= self.current_size {
                self.current_size + 1
            } else {
                grown
            };
            grown.min(base)
        };
        if drift_detected {
            next = self.config.drift_chunk_size;
        }
        self.current_size = next;
        next
    }
}

/// Step count of the continuous growth model to regrow from `drift_chunk_size`
/// to `base_chunk_size` absent stabilization: `ceil(log_alpha(base / drift))`.
///
/// Quotients that are powers of `alpha` up to floating error snap to the exact
/// logarithm instead of rounding up.
pub fn restore_steps(base_chunk_size: usize, drift_chunk_size: usize, alpha: f64) -> usize {
    let t = (base_chunk_size as f64 / drift_chunk_size as f64).ln() / alpha.ln();
    let snapped = if (t - t.round()).abs() < 1e-9 {
        t.round()
    } else {
        t.ceil()
    };
    snapped.max(0.0) as usize
}
