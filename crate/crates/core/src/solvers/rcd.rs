use super::trace::Recorder;
use super::{check_len, GapMonitor, SolverConfig, SolverError, SolverTrace, StepFailure, TerminalStatus, WarmRadii};
use crate::linesearch::{guarded_line_step, LineOracle, LineSearchStatus};
use crate::oracle::{ComparisonOracle, Direction};
use crate::sampling::CoordinateSmoothness;
use crate::Rng;

/// Random coordinate descent driven by comparisons: sample `i ~ p_α`,
/// minimize along `e_i` with bracket + golden-ratio search, keep the step
/// only if it is not worse than staying put.
///
/// The step size is found entirely by the line search; the constants `L_i`
/// only shape the sampling distribution (and not even that when `α = 0`).
pub fn order_rcd<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    smoothness: &CoordinateSmoothness,
    x0: &[f64],
    cfg: &SolverConfig,
    gap: Option<GapMonitor<'_>>,
) -> Result<SolverTrace, SolverError> {
    cfg.validate()?;
    let d = smoothness.dim();
    check_len("x0", d, x0.len())?;
    check_len("oracle", d, oracle.dim())?;
    let alpha = cfg.alpha.unwrap_or(smoothness.alpha());
    let dist = smoothness.distribution_for(alpha);
    let mut rng = Rng::new(cfg.seed);
    let mut radii = WarmRadii::new(d, cfg.r0, cfg.line_tol);
    let mut x = x0.to_vec();
    let start = oracle.call_count();
    let mut rec = Recorder::new(&cfg.trace, cfg.max_iterations, cfg.seed, gap);

    if rec.observe(0, 0, &x) {
        return Ok(rec.finish(0, 0, &x, TerminalStatus::TargetReached));
    }
    for k in 1..=cfg.max_iterations {
        let i = dist.sample(&mut rng);
        let settings = crate::linesearch::SearchSettings {
            r0: radii.get(i),
            ..cfg.search()
        };
        let step = {
            let mut line = LineOracle::new(&mut *oracle, &x, Direction::Coordinate(i));
            guarded_line_step(&mut line, settings).map_err(StepFailure::from)
        };
        let calls = oracle.call_count() - start;
        match step {
            Ok(s) if s.status == LineSearchStatus::HitMaxExpansion => {
                return Ok(rec.finish(k - 1, calls, &x, TerminalStatus::HitMaxExpansion));
            }
            Ok(s) => {
                x[i] += s.eta;
                radii.update(i, s.eta);
            }
            Err(StepFailure::Oracle(error)) => {
                return Ok(rec.finish(k - 1, calls, &x, TerminalStatus::OracleFailed { error }));
            }
            Err(StepFailure::Fatal(e)) => return Err(e),
        }
        if rec.observe(k, calls, &x) {
            return Ok(rec.finish(k, calls, &x, TerminalStatus::TargetReached));
        }
    }
    let calls = oracle.call_count() - start;
    Ok(rec.finish(cfg.max_iterations, calls, &x, TerminalStatus::Completed))
}
