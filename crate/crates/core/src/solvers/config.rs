use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linesearch::SearchSettings;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field} = {value} must be finite and > 0")]
    NotPositive { field: &'static str, value: f64 },
    #[error("alpha = {0} must lie in [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("OrderACDM needs mu > 0")]
    MissingMu,
    #[error("trace.every must be at least 1")]
    ZeroTraceStride,
    #[error("the white-box gamma schedule needs gradient and smoothness access")]
    WhiteBoxUnavailable,
}

/// Smoothing radius schedule for the stochastic solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaSchedule {
    /// `γ = ‖∇f(x, ξ)‖ / (√d · L)`; benchmarking only.
    WhiteBox,
    Fixed { gamma: f64 },
    /// `γ_k = γ / √k`.
    Decaying { gamma: f64 },
}

impl Default for GammaSchedule {
    fn default() -> Self {
        GammaSchedule::Fixed { gamma: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceOptions {
    /// Record every `every`-th iteration (the first and last are always kept).
    pub every: u64,
    /// Store full iterates in the records.
    pub iterates: bool,
    /// Stop as soon as the gap monitor reports a value `<=` this.
    pub stop_below: Option<f64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            every: 1,
            iterates: false,
            stop_below: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iterations: u64,
    pub line_tol: f64,
    /// Sampling exponent; `None` uses the one stored with the smoothness
    /// constants.
    pub alpha: Option<f64>,
    /// Strong-convexity modulus `μ_α` (OrderACDM only).
    pub mu: Option<f64>,
    /// Run the second (ζ) line search of OrderACDM.
    pub acdm_second_search: bool,
    /// Base step of the stochastic solver; `η_k = η / k`.
    pub eta: f64,
    pub gamma: GammaSchedule,
    pub seed: u64,
    /// Initial bracketing radius (later replaced by the warm radius).
    pub r0: f64,
    pub max_doublings: u32,
    pub trace: TraceOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            line_tol: 1e-8,
            alpha: None,
            mu: None,
            acdm_second_search: false,
            eta: 1.0,
            gamma: GammaSchedule::default(),
            seed: 0,
            r0: 1.0,
            max_doublings: 60,
            trace: TraceOptions::default(),
        }
    }
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::NotPositive { field, value })
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("line_tol", self.line_tol)?;
        positive("r0", self.r0)?;
        positive("eta", self.eta)?;
        if let Some(a) = self.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(ConfigError::AlphaOutOfRange(a));
            }
        }
        if let Some(mu) = self.mu {
            positive("mu", mu)?;
        }
        match self.gamma {
            GammaSchedule::WhiteBox => {}
            GammaSchedule::Fixed { gamma } | GammaSchedule::Decaying { gamma } => {
                if !(gamma.is_finite() && gamma >= 0.0) {
                    return Err(ConfigError::NotPositive {
                        field: "gamma",
                        value: gamma,
                    });
                }
            }
        }
        if self.trace.every == 0 {
            return Err(ConfigError::ZeroTraceStride);
        }
        Ok(())
    }

    pub(crate) fn search(&self) -> SearchSettings {
        SearchSettings {
            tol: self.line_tol,
            r0: self.r0,
            max_doublings: self.max_doublings,
        }
    }
}
