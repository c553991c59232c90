//! Experiment harness for HTMRL: seeded repeats of the capacity and
//! non-stationary bandit experiments, curve aggregation and file output.

pub mod error;
pub mod output;
pub mod runner;
pub mod segments;
pub mod spec;

pub use error::{HarnessError, Result};
pub use output::{emit_outputs, OutputOptions, OutputPaths};
pub use runner::{run, run_capacity, run_nonstationary, Outcome, RepeatLog, StepRecord};
pub use segments::{mean_steps_to_threshold, segment_recovery_stats, SegmentStats};
pub use spec::{AgentKind, CapacityParams, Experiment, ExperimentSpec, NonstationaryParams, Preset};
