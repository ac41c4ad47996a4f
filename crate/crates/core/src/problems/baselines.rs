//! First-order reference methods with white-box gradients: gradient descent
//! with step `1/L`, random coordinate descent with steps `1/L_i`, and
//! accelerated coordinate descent. Each iteration counts as one oracle call.

use super::QuadraticProblem;
use crate::solvers::trace::Recorder;
use crate::solvers::{acdm_coefficients, ConfigError, SolverConfig, SolverError, SolverTrace, TerminalStatus};
use crate::Rng;

pub fn gd_baseline(p: &QuadraticProblem, x0: &[f64], cfg: &SolverConfig) -> Result<SolverTrace, SolverError> {
    cfg.validate()?;
    check(p, x0)?;
    let step = 1.0 / p.lambda_max();
    let gap = |x: &[f64]| p.suboptimality(x);
    let mut rec = Recorder::new(&cfg.trace, cfg.max_iterations, cfg.seed, Some(&gap));
    let mut x = x0.to_vec();
    if rec.observe(0, 0, &x) {
        return Ok(rec.finish(0, 0, &x, TerminalStatus::TargetReached));
    }
    for k in 1..=cfg.max_iterations {
        let g = p.gradient(&x);
        x.iter_mut().zip(g.iter()).for_each(|(xi, gi)| *xi -= step * gi);
        if rec.observe(k, k, &x) {
            return Ok(rec.finish(k, k, &x, TerminalStatus::TargetReached));
        }
    }
    Ok(rec.finish(cfg.max_iterations, cfg.max_iterations, &x, TerminalStatus::Completed))
}

pub fn rcd_baseline(p: &QuadraticProblem, x0: &[f64], cfg: &SolverConfig) -> Result<SolverTrace, SolverError> {
    cfg.validate()?;
    check(p, x0)?;
    let s = p.smoothness(cfg.alpha.unwrap_or(0.0)).map_err(|_| nonpositive_diagonal())?;
    let dist = s.coordinate_distribution();
    let mut rng = Rng::new(cfg.seed);
    let gap = |x: &[f64]| p.suboptimality(x);
    let mut rec = Recorder::new(&cfg.trace, cfg.max_iterations, cfg.seed, Some(&gap));
    let mut x = x0.to_vec();
    if rec.observe(0, 0, &x) {
        return Ok(rec.finish(0, 0, &x, TerminalStatus::TargetReached));
    }
    for k in 1..=cfg.max_iterations {
        let i = dist.sample(&mut rng);
        x[i] -= p.partial(&x, i) / p.lipschitz()[i];
        if rec.observe(k, k, &x) {
            return Ok(rec.finish(k, k, &x, TerminalStatus::TargetReached));
        }
    }
    Ok(rec.finish(cfg.max_iterations, cfg.max_iterations, &x, TerminalStatus::Completed))
}

/// Accelerated coordinate descent with sampling exponent `β = α/2`; needs
/// `cfg.mu`.
pub fn acdm_baseline(p: &QuadraticProblem, x0: &[f64], cfg: &SolverConfig) -> Result<SolverTrace, SolverError> {
    cfg.validate()?;
    check(p, x0)?;
    let mu = cfg.mu.ok_or(ConfigError::MissingMu)?;
    let alpha = cfg.alpha.unwrap_or(0.0);
    let s = p.smoothness(alpha).map_err(|_| nonpositive_diagonal())?;
    let beta = alpha / 2.0;
    let dist = s.distribution_for(beta);
    let s_beta = s.power_sum(beta);
    acdm_coefficients(0.0, 1.0, s_beta, mu)?;
    let mut rng = Rng::new(cfg.seed);
    let gap = |x: &[f64]| p.suboptimality(x);
    let mut rec = Recorder::new(&cfg.trace, cfg.max_iterations, cfg.seed, Some(&gap));
    let mut x = x0.to_vec();
    let mut z = x0.to_vec();
    let (mut a_sum, mut b_sum) = (0.0, 1.0);
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
        let gi = p.partial(&y, i);
        let li = p.lipschitz()[i];
        for j in 0..x.len() {
            z[j] = (1.0 - bk) * z[j] + bk * y[j];
        }
        z[i] -= co.a / (s.weight(i, 1.0 - alpha) * co.b_next * dist.probability(i)) * gi;
        x = y;
        x[i] -= gi / li;
        a_sum = co.a_next;
        b_sum = co.b_next;
        if a_sum > 1e150 {
            b_sum /= a_sum;
            a_sum = 1.0;
        }
        if rec.observe(k, k, &x) {
            return Ok(rec.finish(k, k, &x, TerminalStatus::TargetReached));
        }
    }
    Ok(rec.finish(cfg.max_iterations, cfg.max_iterations, &x, TerminalStatus::Completed))
}

fn check(p: &QuadraticProblem, x0: &[f64]) -> Result<(), SolverError> {
    if x0.len() == p.dim() {
        Ok(())
    } else {
        Err(SolverError::Dimension {
            what: "x0",
            expected: p.dim(),
            got: x0.len(),
        })
    }
}

fn nonpositive_diagonal() -> SolverError {
    SolverError::InvalidCoefficientInput("coordinate baselines need a strictly positive diagonal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_quadratic;

    fn instance() -> QuadraticProblem {
        let spec: Vec<f64> = (0..20).map(|j| 10f64.powf(2.0 * j as f64 / 19.0)).collect();
        make_quadratic(20, &spec, Some(11), &mut Rng::new(1)).unwrap()
    }

    #[test]
    fn all_baselines_converge() {
        let p = instance();
        let x0 = vec![0.0; 20];
        let cfg = SolverConfig {
            max_iterations: 20_000,
            mu: p.mu_alpha(0.0),
            seed: 3,
            trace: crate::solvers::TraceOptions {
                every: 100,
                ..Default::default()
            },
            ..Default::default()
        };
        for run in [gd_baseline, rcd_baseline, acdm_baseline] {
            let tr = run(&p, &x0, &cfg).unwrap();
            assert!(tr.final_gap().unwrap() < 1e-8, "{:?}", tr.final_gap());
            assert_eq!(tr.oracle_calls, tr.iterations);
        }
    }

    #[test]
    fn rcd_is_monotone() {
        let p = instance();
        let cfg = SolverConfig {
            max_iterations: 2000,
            ..Default::default()
        };
        let tr = rcd_baseline(&p, &[1.0; 20], &cfg).unwrap();
        // exact coordinate minimization; allow rounding at the 1e-16 scale
        assert!(tr
            .records
            .windows(2)
            .all(|w| w[1].f_gap.unwrap() <= w[0].f_gap.unwrap() * (1.0 + 1e-12) + 1e-15));
    }

    #[test]
    fn stop_below_ends_early() {
        let p = instance();
        let cfg = SolverConfig {
            max_iterations: 100_000,
            trace: crate::solvers::TraceOptions {
                stop_below: Some(1e-3),
                every: 1000,
                ..Default::default()
            },
            ..Default::default()
        };
        let tr = gd_baseline(&p, &[0.0; 20], &cfg).unwrap();
        assert_eq!(tr.status, TerminalStatus::TargetReached);
        assert!(tr.final_gap().unwrap() <= 1e-3);
        assert!(tr.iterations < 100_000);
    }
}
