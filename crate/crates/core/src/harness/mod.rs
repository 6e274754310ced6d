//! End-to-end experiment runs: the four polarizer stages, θ sweeps, the
//! series-flip demonstration and the two-frame relativity report.
//!
//! Every trial draws its randomness from a substream addressed by
//! `(seed, stream, trial)`, so results do not depend on how trials are
//! spread over worker threads.

mod config;
mod relativity_demo;
mod rng;
mod series_demo;
mod stage;
mod sweep;

use thiserror::Error;

use crate::hidden::FlipError;
use crate::quantum::QuantumError;
use crate::relativity::RelativityError;
use crate::stats::StatsError;

pub use config::{ExperimentConfig, Stage, DEFAULT_SEED, DEFAULT_TRIALS};
pub use relativity_demo::{
    run_relativity_example, RelativityReport, RelativityScenario, SignalReport, SignalScenario,
};
pub use rng::{stream_id, TrialStreams, WORDS_PER_TRIAL};
pub use series_demo::{
    run_series_demo, SeriesDemoConfig, SeriesDemoMode, SeriesDemoReport, REFERENCE_SERIES,
};
pub use stage::{run_stage, simulate_series, StageResult};
pub use sweep::{format_sig9, run_sweep, theta_grid, SweepOptions, SweepRow, SweepTable};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Flip(#[from] FlipError),
    #[error(transparent)]
    Relativity(#[from] RelativityError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl HarnessError {
    /// Process exit code: 2 for internal invariant failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Invariant(_) => 2,
            _ => 1,
        }
    }
}
