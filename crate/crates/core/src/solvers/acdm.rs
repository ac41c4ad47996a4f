use serde::{Deserialize, Serialize};

use super::config::ConfigError;
use super::trace::Recorder;
use super::{check_len, GapMonitor, SolverConfig, SolverError, SolverTrace, StepFailure, TerminalStatus, WarmRadii};
use crate::linesearch::{guarded_line_step, GuardedStep, LineOracle, LineSearchStatus, SearchSettings};
use crate::oracle::{ComparisonOracle, Direction};
use crate::sampling::CoordinateSmoothness;
use crate::Rng;

/// One step of the estimate-sequence recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcdmCoefficients {
    pub a: f64,
    pub a_next: f64,
    pub b_next: f64,
    pub alpha_k: f64,
    pub beta_k: f64,
}

/// Solves `a² S² = (A + a)(B + μ a)` for its positive root, i.e.
/// `(S² - μ) a² - (B + μ A) a - A B = 0`.
///
/// With `q = S² - μ > 0` and `p, c >= 0` the "+" branch of the quadratic
/// formula has no cancellation. `q <= 0` (including the linear case
/// `q = 0`) leaves no positive root. `μ = 0` is accepted here as the convex
/// boundary case even though the solver itself needs `μ > 0`.
pub fn acdm_coefficients(a_k: f64, b_k: f64, s_beta: f64, mu: f64) -> Result<AcdmCoefficients, SolverError> {
    if !(a_k.is_finite() && a_k >= 0.0) {
        return Err(SolverError::InvalidCoefficientInput("A_k must be finite and >= 0"));
    }
    if !(b_k.is_finite() && b_k > 0.0) {
        return Err(SolverError::InvalidCoefficientInput("B_k must be finite and > 0"));
    }
    if !(s_beta.is_finite() && s_beta > 0.0) {
        return Err(SolverError::InvalidCoefficientInput("S_beta must be finite and > 0"));
    }
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(SolverError::InvalidCoefficientInput("mu must be finite and >= 0"));
    }
    let s_sq = s_beta * s_beta;
    let q = s_sq - mu;
    if q <= 0.0 {
        return Err(SolverError::NoPositiveRoot { mu, s_beta_sq: s_sq });
    }
    let p = b_k + mu * a_k;
    let c = a_k * b_k;
    // p >= B_k > 0; written as p/(2q)·(1 + sqrt(1 + 4qc/p²)) so that p² cannot overflow
    let a = p / (2.0 * q) * (1.0 + (1.0 + 4.0 * q * (c / p) / p).sqrt());
    let a_next = a_k + a;
    let b_next = b_k + mu * a;
    Ok(AcdmCoefficients {
        a,
        a_next,
        b_next,
        alpha_k: a / a_next,
        beta_k: mu * a / b_next,
    })
}

/// Snapshot handed to the observer after every OrderACDM iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct AcdmState {
    /// Iterations completed.
    pub iteration: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    /// `A_k` and `B_k` after the iteration, divided by `exp(log_scale)`.
    /// The recurrence is homogeneous in `(A, B, a)`, so the solver rescales
    /// both once they get large; `α_k` and `β_k` are unaffected.
    pub a_sum: f64,
    pub b_sum: f64,
    pub log_scale: f64,
    pub coefficients: AcdmCoefficients,
    pub coordinate: usize,
    pub eta: f64,
    pub zeta: f64,
    /// `S_β` used in the coefficient equation.
    pub s_beta: f64,
}

impl AcdmState {
    /// `ln A_k` without the rescaling.
    pub fn log_a_sum(&self) -> f64 {
        self.a_sum.ln() + self.log_scale
    }

    /// `ln B_k` without the rescaling.
    pub fn log_b_sum(&self) -> f64 {
        self.b_sum.ln() + self.log_scale
    }
}

const RESCALE_ABOVE: f64 = 1e150;

/// Accelerated coordinate descent with comparison-based line searches.
/// Samples with `β = α/2`; the ζ search is skipped unless
/// `cfg.acdm_second_search` is set.
pub fn order_acdm<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    smoothness: &CoordinateSmoothness,
    x0: &[f64],
    cfg: &SolverConfig,
    gap: Option<GapMonitor<'_>>,
) -> Result<SolverTrace, SolverError> {
    order_acdm_observed(oracle, smoothness, x0, cfg, gap, |_| {})
}

pub fn order_acdm_observed<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    smoothness: &CoordinateSmoothness,
    x0: &[f64],
    cfg: &SolverConfig,
    gap: Option<GapMonitor<'_>>,
    mut observe: impl FnMut(&AcdmState),
) -> Result<SolverTrace, SolverError> {
    cfg.validate()?;
    let mu = cfg.mu.ok_or(ConfigError::MissingMu)?;
    let d = smoothness.dim();
    check_len("x0", d, x0.len())?;
    check_len("oracle", d, oracle.dim())?;
    let alpha = cfg.alpha.unwrap_or(smoothness.alpha());
    let beta = alpha / 2.0;
    let dist = smoothness.distribution_for(beta);
    let s_beta = smoothness.power_sum(beta);
    // Fail early on inconsistent (μ, L) rather than mid-run.
    acdm_coefficients(0.0, 1.0, s_beta, mu)?;

    let mut rng = Rng::new(cfg.seed);
    let mut eta_radii = WarmRadii::new(d, cfg.r0, cfg.line_tol);
    let mut zeta_radii = WarmRadii::new(d, cfg.r0, cfg.line_tol);
    let mut x = x0.to_vec();
    let mut z = x0.to_vec();
    let (mut a_sum, mut b_sum) = (0.0, 1.0);
    let mut log_scale = 0.0;
    let start = oracle.call_count();
    let mut rec = Recorder::new(&cfg.trace, cfg.max_iterations, cfg.seed, gap);

    if rec.observe(0, 0, &x) {
        return Ok(rec.finish(0, 0, &x, TerminalStatus::TargetReached));
    }
    for k in 1..=cfg.max_iterations {
        let i = dist.sample(&mut rng);
        let co = acdm_coefficients(a_sum, b_sum, s_beta, mu)?;
        let (ak, bk) = (co.alpha_k, co.beta_k);
        let denom = 1.0 - ak * bk;
        let y: Vec<f64> = x
            .iter()
            .zip(&z)
            .map(|(xj, zj)| ((1.0 - ak) * xj + ak * (1.0 - bk) * zj) / denom)
            .collect();

        let eta = match search(&mut *oracle, &y, i, eta_radii.get(i), cfg) {
            Ok(s) if s.status == LineSearchStatus::HitMaxExpansion => {
                let calls = oracle.call_count() - start;
                return Ok(rec.finish(k - 1, calls, &x, TerminalStatus::HitMaxExpansion));
            }
            Ok(s) => s.eta,
            Err(StepFailure::Oracle(error)) => {
                let calls = oracle.call_count() - start;
                return Ok(rec.finish(k - 1, calls, &x, TerminalStatus::OracleFailed { error }));
            }
            Err(StepFailure::Fatal(e)) => return Err(e),
        };
        eta_radii.update(i, eta);

        let gain = co.a * smoothness.weight(i, alpha) / (co.b_next * dist.probability(i));
        let mut w: Vec<f64> = z.iter().zip(&y).map(|(zj, yj)| (1.0 - bk) * zj + bk * yj).collect();
        w[i] += gain * eta;

        let mut zeta = 0.0;
        if cfg.acdm_second_search {
            zeta = match search(&mut *oracle, &w, i, zeta_radii.get(i), cfg) {
                Ok(s) if s.status == LineSearchStatus::HitMaxExpansion => {
                    let calls = oracle.call_count() - start;
                    return Ok(rec.finish(k - 1, calls, &x, TerminalStatus::HitMaxExpansion));
                }
                Ok(s) => s.eta,
                Err(StepFailure::Oracle(error)) => {
                    let calls = oracle.call_count() - start;
                    return Ok(rec.finish(k - 1, calls, &x, TerminalStatus::OracleFailed { error }));
                }
                Err(StepFailure::Fatal(e)) => return Err(e),
            };
            zeta_radii.update(i, zeta);
        }

        x.clone_from(&y);
        x[i] += eta;
        z.clone_from(&w);
        z[i] += zeta;
        a_sum = co.a_next;
        b_sum = co.b_next;
        if a_sum > RESCALE_ABOVE {
            log_scale += a_sum.ln();
            b_sum /= a_sum;
            a_sum = 1.0;
        }

        observe(&AcdmState {
            iteration: k,
            x: x.clone(),
            y,
            z: z.clone(),
            w,
            a_sum,
            b_sum,
            log_scale,
            coefficients: co,
            coordinate: i,
            eta,
            zeta,
            s_beta,
        });

        let calls = oracle.call_count() - start;
        if rec.observe(k, calls, &x) {
            return Ok(rec.finish(k, calls, &x, TerminalStatus::TargetReached));
        }
    }
    let calls = oracle.call_count() - start;
    Ok(rec.finish(cfg.max_iterations, calls, &x, TerminalStatus::Completed))
}

fn search<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    base: &[f64],
    i: usize,
    r0: f64,
    cfg: &SolverConfig,
) -> Result<GuardedStep, StepFailure> {
    let mut line = LineOracle::new(oracle, base, Direction::Coordinate(i));
    let settings = SearchSettings { r0, ..cfg.search() };
    Ok(guarded_line_step(&mut line, settings)?)
}
