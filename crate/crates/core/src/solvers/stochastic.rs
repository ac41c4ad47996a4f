use super::config::{ConfigError, GammaSchedule};
use super::trace::Recorder;
use super::{check_len, GapMonitor, SolverConfig, SolverError, SolverTrace, TerminalStatus};
use crate::oracle::{OracleError, Sign3, StochasticObjective, StochasticOrderOracle};
use crate::sampling::sample_unit_sphere;
use crate::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticStep {
    pub next: Vec<f64>,
    /// `φ(x + γe, x - γe, ξ)`.
    pub sign: Sign3,
}

/// `x - η · φ(x + γe, x - γe, ξ) · e` with a fresh realization `ξ`.
pub fn stochastic_order_step<F: StochasticObjective>(
    x: &[f64],
    e: &[f64],
    gamma: f64,
    eta: f64,
    oracle: &mut StochasticOrderOracle<F>,
) -> Result<StochasticStep, OracleError> {
    let xi = oracle.draw_realization();
    stochastic_order_step_with(x, e, gamma, eta, oracle, xi.as_slice())
}

/// Same as [`stochastic_order_step`] on a given realization.
pub fn stochastic_order_step_with<F: StochasticObjective>(
    x: &[f64],
    e: &[f64],
    gamma: f64,
    eta: f64,
    oracle: &mut StochasticOrderOracle<F>,
    xi: &[f64],
) -> Result<StochasticStep, OracleError> {
    if e.len() != x.len() {
        return Err(OracleError::DimensionMismatch {
            expected: x.len(),
            got: e.len(),
        });
    }
    let plus: Vec<f64> = x.iter().zip(e).map(|(a, b)| a + gamma * b).collect();
    let minus: Vec<f64> = x.iter().zip(e).map(|(a, b)| a - gamma * b).collect();
    let sign = oracle.compare_with(&plus, &minus, xi)?;
    let s = sign.as_f64();
    let next = x.iter().zip(e).map(|(a, b)| a - eta * s * b).collect();
    Ok(StochasticStep { next, sign })
}

/// Normalized-SGD-like iteration driven by the stochastic order oracle:
/// fresh sphere direction `e_k`, step `η_k = η / k`, smoothing radius per
/// `cfg.gamma`. Directions are drawn from `Rng::new(cfg.seed)`; the
/// realizations come from the oracle's own generator.
pub fn stochastic_order_sgd<F: StochasticObjective>(
    oracle: &mut StochasticOrderOracle<F>,
    x0: &[f64],
    cfg: &SolverConfig,
    gap: Option<GapMonitor<'_>>,
) -> Result<SolverTrace, SolverError> {
    cfg.validate()?;
    let d = oracle.dim();
    check_len("x0", d, x0.len())?;
    let white_box_l = match cfg.gamma {
        GammaSchedule::WhiteBox => Some(
            oracle
                .white_box_smoothness()
                .filter(|l| l.is_finite() && *l > 0.0)
                .ok_or(ConfigError::WhiteBoxUnavailable)?,
        ),
        _ => None,
    };
    let mut rng = Rng::new(cfg.seed);
    let mut x = x0.to_vec();
    let start = oracle.call_count();
    let mut rec = Recorder::new(&cfg.trace, cfg.max_iterations, cfg.seed, gap);
    if rec.observe(0, 0, &x) {
        return Ok(rec.finish(0, 0, &x, TerminalStatus::TargetReached));
    }
    for k in 1..=cfg.max_iterations {
        let e = sample_unit_sphere(d, &mut rng);
        let eta_k = cfg.eta / k as f64;
        let xi = oracle.draw_realization();
        let gamma = match cfg.gamma {
            GammaSchedule::Fixed { gamma } => gamma,
            GammaSchedule::Decaying { gamma } => gamma / (k as f64).sqrt(),
            GammaSchedule::WhiteBox => {
                let g = oracle
                    .white_box_gradient(&x, xi.as_slice())
                    .ok_or(ConfigError::WhiteBoxUnavailable)?;
                g.norm() / ((d as f64).sqrt() * white_box_l.unwrap_or(1.0))
            }
        };
        match stochastic_order_step_with(&x, e.as_slice(), gamma, eta_k, oracle, xi.as_slice()) {
            Ok(step) => x = step.next,
            Err(error) => {
                let calls = oracle.call_count() - start;
                return Ok(rec.finish(k - 1, calls, &x, TerminalStatus::OracleFailed { error }));
            }
        }
        let calls = oracle.call_count() - start;
        if rec.observe(k, calls, &x) {
            return Ok(rec.finish(k, calls, &x, TerminalStatus::TargetReached));
        }
    }
    let calls = oracle.call_count() - start;
    Ok(rec.finish(cfg.max_iterations, calls, &x, TerminalStatus::Completed))
}
