//! Chunk-based data-stream classification with adaptive chunk sizing.
//!
//! A stream is consumed in chunks under the test-then-train protocol by an
//! ensemble that trains one new member per chunk. A drift detector watches
//! per-sample outcomes and a variance-based detector watches per-chunk scores;
//! together they drive a chunk-size schedule that shrinks on drift, regrows
//! geometrically, and snaps back to the base size once accuracy stabilizes.
//! Evaluation utilities compute Sample Restoration (samples consumed until a
//! fraction of the post-drift peak accuracy is regained), paired signed-rank
//! significance tests, and smoothed accuracy curves.

pub mod chunk;
pub mod detectors;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod scheduler;
pub mod stream;

pub use chunk::{Chunk, Sample};
pub use detectors::{
    hoeffding_bound, DriftSignal, Fhddm, StabilizationSignal, StabilizationWindow,
};
pub use ensemble::{
    awe_member_weight, model_accuracy, sea_select_members, wae_member_weight, EnsembleConfig,
    EnsembleModel, Member, Strategy,
};
pub use error::{CarError, Result};
pub use evaluation::{
    gaussian_smooth, read_trace_csv, sample_restoration, segment_runs, sr_report,
    test_then_train_run, wilcoxon_one_sided_signed_rank, write_trace_csv, ChunkTrace, Restoration,
    RunRecord, SegmentRestoration, SrReport, WilcoxonOutcome,
};
pub use learners::{fit_batch, LearnerKind, LearnerSpec, TrainedModel};
pub use scheduler::{restore_steps, SchedulerConfig, SchedulerState};
pub use stream::transforms::{inject_label_noise, oversample_chunk, ChunkTransform};
pub use stream::{concept_mixture_weight, DriftType, StreamSource, SyntheticStreamSpec};
