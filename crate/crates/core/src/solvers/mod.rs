//! The optimization procedures. Every solver sees the objective only
//! through a [`ComparisonOracle`](crate::ComparisonOracle); the optional
//! gap monitor is a white-box hook used by benchmarks and never influences
//! the iterates.

mod acdm;
mod config;
mod rcd;
mod square;
mod stochastic;
pub(crate) mod trace;

pub use acdm::{acdm_coefficients, order_acdm, order_acdm_observed, AcdmCoefficients, AcdmState};
pub use config::{ConfigError, GammaSchedule, SolverConfig, TraceOptions};
pub use rcd::order_rcd;
pub use square::{square_halving_2d, square_halving_2d_observed, SquareHalvingConfig, SquareHalvingResult, SquareRound, Square2D};
pub use stochastic::{stochastic_order_sgd, stochastic_order_step, stochastic_order_step_with, StochasticStep};
pub use trace::{SolverTrace, TerminalStatus, TraceRecord};

use thiserror::Error;

use crate::linesearch::LineSearchError;
use crate::oracle::OracleError;

/// White-box monitor, e.g. `f(x) - f*`, evaluated on recorded iterates.
pub type GapMonitor<'a> = &'a dyn Fn(&[f64]) -> f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("no positive root for the ACDM coefficient: mu = {mu} must be below S_beta^2 = {s_beta_sq}")]
    NoPositiveRoot { mu: f64, s_beta_sq: f64 },
    #[error("invalid ACDM coefficient input: {0}")]
    InvalidCoefficientInput(&'static str),
    #[error(transparent)]
    LineSearch(LineSearchError),
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), SolverError> {
    if expected == got {
        Ok(())
    } else {
        Err(SolverError::Dimension {
            what,
            expected,
            got,
        })
    }
}

/// Line-search failures split into "stop the run" (oracle trouble, which
/// the trace reports) and genuine programming errors.
enum StepFailure {
    Oracle(OracleError),
    Fatal(SolverError),
}

impl From<LineSearchError> for StepFailure {
    fn from(e: LineSearchError) -> Self {
        match e {
            LineSearchError::Oracle(o) => StepFailure::Oracle(o),
            other => StepFailure::Fatal(SolverError::LineSearch(other)),
        }
    }
}

/// Per-coordinate warm start for the bracketing radius.
struct WarmRadii {
    radii: Vec<f64>,
    floor: f64,
}

impl WarmRadii {
    fn new(dim: usize, r0: f64, floor: f64) -> Self {
        Self {
            radii: vec![r0.max(floor); dim],
            floor,
        }
    }

    fn get(&self, i: usize) -> f64 {
        self.radii[i]
    }

    fn update(&mut self, i: usize, accepted_step: f64) {
        if accepted_step != 0.0 {
            self.radii[i] = accepted_step.abs().max(self.floor);
        }
    }
}
