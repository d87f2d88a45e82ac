//! Configuration, batch experiment running, persistence, detection
//! metrics, design-curve emission, and baseline tuning.

pub mod config;
pub mod curves;
pub mod metrics;
pub mod runner;
pub mod tuning;

pub use config::{EnvironmentKind, ExperimentConfig, TheorySection, TscdSettings};
pub use curves::emit_theory_curves;
pub use metrics::{mean_and_variance, median, wilson_interval, DetectionStats};
pub use runner::{
    build_trace, resolve_mean_table, rerun_from_manifest, run_and_persist, run_experiment,
    run_single, ExperimentResult, Manifest, PolicySummary, RunRecord,
};
pub use tuning::{grid_search_baselines, TuneOutcome};

use thiserror::Error;

/// Harness failures, split so the CLI can map them to exit codes
/// (config errors exit 1, runtime errors exit 2).
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl HarnessError {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            _ => 2,
        }
    }
}
