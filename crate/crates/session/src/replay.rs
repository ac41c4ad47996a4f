//! Solvers here are plain synchronous functions, so a human answer cannot be
//! awaited mid-run. Instead every state is recomputed from scratch: the
//! solver is run against the recorded answers and stops at the first
//! comparison nobody has answered yet. Solvers are deterministic given the
//! seed and the answers, so this is exact.

use orderopt::linesearch::LineSearchError;
use orderopt::oracle::{ComparisonOracle, OracleError, Sign3};
use orderopt::solvers::{
    order_acdm, order_rcd, square_halving_2d_observed, Square2D, SolverError, TraceOptions,
};
use orderopt::{CoordinateSmoothness, SolverTrace, TerminalStatus};
use serde::{Deserialize, Serialize};

use crate::spec::{SessionSolver, SessionSpec};
use crate::SessionError;

/// Answers comparisons from a fixed list, then refuses with
/// [`OracleError::Suspended`] carrying the unanswered pair.
pub struct ReplayOracle<'a> {
    dim: usize,
    answers: &'a [Sign3],
    cursor: usize,
}

impl<'a> ReplayOracle<'a> {
    pub fn new(dim: usize, answers: &'a [Sign3]) -> Self {
        Self {
            dim,
            answers,
            cursor: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.cursor
    }
}

impl ComparisonOracle for ReplayOracle<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn compare(&mut self, x: &[f64], y: &[f64]) -> Result<Sign3, OracleError> {
        match self.answers.get(self.cursor) {
            Some(&a) => {
                self.cursor += 1;
                Ok(a)
            }
            None => Err(OracleError::Suspended {
                first: x.to_vec(),
                second: y.to_vec(),
            }),
        }
    }

    fn call_count(&self) -> u64 {
        self.cursor as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinishReason {
    BudgetExhausted,
    /// The solver ran to its own stopping rule.
    SolverFinished,
    /// A line search could not bracket a minimum; usually contradictory
    /// answers.
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Progress {
    /// Solver coordinates of the next comparison.
    Pending { first: Vec<f64>, second: Vec<f64> },
    Finished(FinishReason),
}

/// One completed iteration (or square-halving round), in solver
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub iteration: u64,
    pub queries_used: u64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub progress: Progress,
    /// Starts with the box center at iteration 0.
    pub trajectory: Vec<Waypoint>,
}

impl Replay {
    pub fn current(&self) -> &Waypoint {
        self.trajectory.last().expect("trajectory starts with the initial point")
    }
}

/// Runs the session's solver on `answers`.
pub fn replay(spec: &SessionSpec, answers: &[Sign3]) -> Result<Replay, SessionError> {
    let d = spec.dim();
    let budget_left = (answers.len() as u64) < spec.query_budget;
    let mut oracle = ReplayOracle::new(d, answers);

    let (trajectory, pending) = match spec.solver {
        SessionSolver::OrderRcd | SessionSolver::OrderAcdm => {
            let mut cfg = spec.config.clone();
            cfg.trace = TraceOptions {
                every: 1,
                iterates: true,
                stop_below: None,
            };
            let smoothness = CoordinateSmoothness::uniform(d).map_err(|e| SessionError::Solver(e.to_string()))?;
            let x0 = vec![0.0; d];
            let trace = if spec.solver == SessionSolver::OrderRcd {
                order_rcd(&mut oracle, &smoothness, &x0, &cfg, None)
            } else {
                order_acdm(&mut oracle, &smoothness, &x0, &cfg, None)
            }
            .map_err(|e| SessionError::Solver(e.to_string()))?;
            from_trace(trace)
        }
        SessionSolver::SquareHalving => {
            let cfg = spec.square_config();
            let sq0 = Square2D::new([0.0, 0.0], 1.0).expect("unit square is valid");
            let mut trajectory = vec![Waypoint {
                iteration: 0,
                queries_used: 0,
                u: vec![0.0, 0.0],
            }];
            let mut k = 0;
            let result = square_halving_2d_observed(&mut oracle, sq0, &cfg, |round| {
                k += 1;
                trajectory.push(Waypoint {
                    iteration: k,
                    queries_used: round.oracle_calls,
                    u: round.square.center.to_vec(),
                });
            });
            let pending = match result {
                Ok(_) => Ok(FinishReason::SolverFinished),
                Err(SolverError::LineSearch(LineSearchError::Oracle(OracleError::Suspended { first, second }))) => {
                    Err((first, second))
                }
                Err(e) => return Err(SessionError::Solver(e.to_string())),
            };
            (trajectory, pending)
        }
    };

    let progress = match pending {
        Err((first, second)) if budget_left => Progress::Pending { first, second },
        Err(_) => Progress::Finished(FinishReason::BudgetExhausted),
        Ok(reason) => {
            if oracle.consumed() < answers.len() {
                return Err(SessionError::ReplayMismatch(format!(
                    "solver stopped after {} answers but {} are recorded",
                    oracle.consumed(),
                    answers.len()
                )));
            }
            Progress::Finished(reason)
        }
    };
    Ok(Replay { progress, trajectory })
}

type Outcome = Result<FinishReason, (Vec<f64>, Vec<f64>)>;

fn from_trace(trace: SolverTrace) -> (Vec<Waypoint>, Outcome) {
    let trajectory = trace
        .records
        .into_iter()
        .map(|r| Waypoint {
            iteration: r.iteration,
            queries_used: r.oracle_calls,
            u: r.iterate.expect("iterates are recorded"),
        })
        .collect();
    let outcome = match trace.status {
        TerminalStatus::Completed | TerminalStatus::TargetReached => Ok(FinishReason::SolverFinished),
        TerminalStatus::HitMaxExpansion => Ok(FinishReason::LineSearchFailed),
        TerminalStatus::OracleFailed {
            error: OracleError::Suspended { first, second },
        } => Err((first, second)),
        // ReplayOracle never raises anything else
        TerminalStatus::OracleFailed { .. } => Ok(FinishReason::LineSearchFailed),
    };
    (trajectory, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ParamSpec;
    use orderopt::linesearch::RHO;
    use orderopt::SolverConfig;

    fn spec(solver: SessionSolver, d: usize) -> SessionSpec {
        SessionSpec {
            params: (0..d)
                .map(|j| ParamSpec {
                    name: format!("p{j}"),
                    lower: -1.0,
                    upper: 1.0,
                })
                .collect(),
            solver,
            config: SolverConfig {
                max_iterations: 50,
                mu: Some(0.1),
                ..Default::default()
            },
            square: None,
            query_budget: 10_000,
        }
    }

    fn pending(r: &Replay) -> (Vec<f64>, Vec<f64>) {
        match &r.progress {
            Progress::Pending { first, second } => (first.clone(), second.clone()),
            other => panic!("not pending: {other:?}"),
        }
    }

    #[test]
    fn first_query_is_the_bracket_probe() {
        let s = spec(SessionSolver::OrderRcd, 1);
        let r = replay(&s, &[]).unwrap();
        // bracketing starts by comparing r0 against r0/2
        assert_eq!(pending(&r), (vec![1.0], vec![0.5]));
        assert_eq!(r.trajectory.len(), 1);
    }

    #[test]
    fn golden_probes_follow_the_shrink_law() {
        // 1-D, answers that stop the bracket at once: compare(1, .5) = +,
        // compare(-1, -.5) = +  → bracket [-1, 1]
        let s = spec(SessionSolver::OrderRcd, 1);
        let answers = vec![Sign3::Plus, Sign3::Plus];
        let (a, b) = pending(&replay(&s, &answers).unwrap());
        let (lo, hi) = (-1.0, 1.0);
        let w = hi - lo;
        assert!((a[0] - (hi - RHO * w)).abs() < 1e-15);
        assert!((b[0] - (lo + RHO * w)).abs() < 1e-15);

        // prefer the left probe: the right end moves in
        let mut answers = answers;
        answers.push(Sign3::Minus);
        let (a2, b2) = pending(&replay(&s, &answers).unwrap());
        let w2 = b[0] - lo;
        assert!((w2 - RHO * w).abs() < 1e-15);
        assert!((a2[0] - (lo + (1.0 - RHO) * w2)).abs() < 1e-15);
        // the surviving probe is reused
        assert_eq!(b2[0], a[0]);
    }

    #[test]
    fn budget_ends_the_session() {
        let mut s = spec(SessionSolver::OrderRcd, 2);
        s.query_budget = 3;
        let r = replay(&s, &[Sign3::Plus; 3]).unwrap();
        assert_eq!(r.progress, Progress::Finished(FinishReason::BudgetExhausted));
    }

    #[test]
    fn every_solver_suspends_and_is_deterministic() {
        for (solver, d) in [
            (SessionSolver::OrderRcd, 3),
            (SessionSolver::OrderAcdm, 3),
            (SessionSolver::SquareHalving, 2),
        ] {
            let s = spec(solver, d);
            let answers: Vec<Sign3> = (0..40).map(|k| if k % 3 == 0 { Sign3::Minus } else { Sign3::Plus }).collect();
            let a = replay(&s, &answers).unwrap();
            let b = replay(&s, &answers).unwrap();
            assert_eq!(a, b);
            assert!(matches!(a.progress, Progress::Pending { .. }), "{solver:?}");
        }
    }
}
