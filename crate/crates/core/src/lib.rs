//! Derivative-free optimization driven only by an *order oracle*: the
//! objective is never evaluated by a solver, it can only ask whether
//! `f(x) < f(y)`, `f(x) = f(y)` or `f(x) > f(y)` (possibly corrupted by a
//! bounded, adversarial perturbation).
//!
//! The crate is organised bottom-up:
//!
//! - [`rng`] and [`sampling`]: seeded randomness, coordinate-smoothness
//!   bookkeeping and the coordinate/sphere samplers;
//! - [`oracle`]: deterministic and stochastic comparison oracles with call
//!   accounting;
//! - [`linesearch`]: bracketing plus the golden-ratio method, comparison-only;
//! - [`solvers`]: OrderRCD, OrderACDM, comparison-based normalized SGD and the
//!   2-D square-halving method;
//! - [`problems`]: white-box quadratic test problems, stochastic variants and
//!   first-order reference baselines.

pub mod linesearch;
pub mod oracle;
pub mod problems;
pub mod rng;
pub mod sampling;
pub mod solvers;

pub use nalgebra;

/// Dense real vector used for iterates and directions.
pub type Vector = nalgebra::DVector<f64>;

pub use linesearch::{LineOracle, LineSearchResult, LineSearchStatus};
pub use oracle::{
    ComparisonOracle, Direction, NoiseModel, Objective, OracleError, OrderOracle, Sign3,
    StochasticObjective, StochasticOrderOracle,
};
pub use rng::Rng;
pub use sampling::{CoordinateDistribution, CoordinateSmoothness, SmoothnessError};
pub use solvers::{SolverConfig, SolverTrace, TerminalStatus};
