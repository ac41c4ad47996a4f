//! Experiment runner for the order-oracle solvers: sweeps solvers × seeds ×
//! noise levels on a quadratic instance, writes CSV traces, and reduces them
//! to oracle-complexity tables and deviation statistics.

pub mod config;
pub mod run;
pub mod stats;
pub mod trace;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, SolverEntry, SolverKind, StartPoint};
pub use run::{run_experiment, run_experiment_with_jobs, CellFailure, ExperimentOutcome};
pub use stats::{
    deviation_probability, markov_budget, summarize_oracle_complexity, ComplexityTable, Deviation,
};
pub use trace::{read_trace_dir, TraceFile, TraceRow, TRACE_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("problem: {0}")]
    Problem(#[from] orderopt::problems::ProblemError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {reason}")]
    BadTrace { path: PathBuf, reason: String },
    #[error("need at least {need} runs, got {got}")]
    InsufficientRuns { got: usize, need: usize },
    #[error("runs end at different iterations ({first} and {other})")]
    MixedBudgets { first: u64, other: u64 },
}

impl BenchError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.to_owned(),
            source,
        }
    }
}
