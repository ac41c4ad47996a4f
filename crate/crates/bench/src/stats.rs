use std::fmt;

use serde::Serialize;

use crate::trace::{group_runs, TraceRow};
use crate::BenchError;

/// Minimum number of runs for the deviation statistic.
pub const MIN_DEVIATION_RUNS: usize = 30;

/// Empirical `P(f(x_N) − f* ≥ ε)` next to the Markov bound `σ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub runs: usize,
    pub exceeding: usize,
    pub fraction: f64,
    pub sigma: f64,
    /// Common terminal iteration of all runs.
    pub budget: u64,
    /// Every run ended at or above `ε`: the budget was too small for the
    /// bound to say anything.
    pub uninformative: bool,
}

impl Deviation {
    /// Three standard deviations of a Binomial(runs, σ) fraction.
    pub fn binomial_band(&self) -> f64 {
        3.0 * (self.sigma * (1.0 - self.sigma) / self.runs as f64).sqrt()
    }

    pub fn within_bound(&self) -> bool {
        self.fraction <= self.sigma + self.binomial_band()
    }
}

pub fn deviation_probability(rows: &[TraceRow], eps: f64, sigma: f64) -> Result<Deviation, BenchError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(BenchError::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(BenchError::InvalidArgument(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    let runs = group_runs(rows);
    if runs.len() < MIN_DEVIATION_RUNS {
        return Err(BenchError::InsufficientRuns {
            got: runs.len(),
            need: MIN_DEVIATION_RUNS,
        });
    }
    let terminals: Vec<&TraceRow> = runs.values().map(|r| *r.last().expect("runs are non-empty")).collect();
    let budget = terminals[0].iteration;
    if let Some(t) = terminals.iter().find(|t| t.iteration != budget) {
        return Err(BenchError::MixedBudgets {
            first: budget,
            other: t.iteration,
        });
    }
    let exceeding = terminals.iter().filter(|t| t.f_gap >= eps).count();
    Ok(Deviation {
        runs: terminals.len(),
        exceeding,
        fraction: exceeding as f64 / terminals.len() as f64,
        sigma,
        budget,
        uninformative: exceeding == terminals.len(),
    })
}

/// Iterations after which the proven contraction
/// `E[f(x_N) − f*] ≤ (1 − μ/(2S))^N F₀` guarantees `E[f(x_N) − f*] ≤ εσ`,
/// so that Markov's inequality gives `P(f(x_N) − f* ≥ ε) ≤ σ`.
pub fn markov_budget(f0: f64, eps: f64, sigma: f64, mu: f64, s_alpha: f64) -> u64 {
    let target = eps * sigma;
    if f0 <= target {
        return 0;
    }
    let rate = -(1.0 - mu / (2.0 * s_alpha)).ln();
    ((f0 / target).ln() / rate).ceil() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub solver: String,
    pub delta: f64,
    pub runs: usize,
    /// Median oracle calls per target; `None` when the median run never got
    /// there.
    pub median_calls: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityTable {
    pub eps: Vec<f64>,
    pub rows: Vec<ComplexityRow>,
}

impl ComplexityTable {
    pub fn get(&self, solver: &str, eps_index: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.solver == solver)
            .and_then(|r| r.median_calls[eps_index])
    }
}

impl fmt::Display for ComplexityTable {
    /// CSV with blank cells for targets that were not reached.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "solver,delta,runs")?;
        for e in &self.eps {
            write!(f, ",eps={e:e}")?;
        }
        writeln!(f)?;
        for r in &self.rows {
            write!(f, "{},{},{}", r.solver, r.delta, r.runs)?;
            for c in &r.median_calls {
                match c {
                    Some(v) => write!(f, ",{v}")?,
                    None => write!(f, ",")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Median (over seeds) of the first `oracle_calls` at which `f_gap ≤ ε`.
/// Runs that never get there count as +∞, so a blank cell means at least
/// half of the seeds failed.
pub fn summarize_oracle_complexity(rows: &[TraceRow], eps_targets: &[f64]) -> ComplexityTable {
    let runs = group_runs(rows);
    let mut table: Vec<ComplexityRow> = Vec::new();
    let mut group: Vec<Vec<f64>> = Vec::new();
    let mut last: Option<(String, u64)> = None;
    let flush = |table: &mut Vec<ComplexityRow>, group: &mut Vec<Vec<f64>>, key: &(String, u64)| {
        let median_calls = (0..eps_targets.len())
            .map(|j| {
                let mut v: Vec<f64> = group.iter().map(|g| g[j]).collect();
                median(&mut v).filter(|m| m.is_finite())
            })
            .collect();
        table.push(ComplexityRow {
            solver: key.0.clone(),
            delta: f64::from_bits(key.1),
            runs: group.len(),
            median_calls,
        });
        group.clear();
    };
    for (key, run) in &runs {
        let k = (key.solver.clone(), key.delta_bits);
        if last.as_ref().is_some_and(|l| *l != k) {
            flush(&mut table, &mut group, last.as_ref().unwrap());
        }
        last = Some(k);
        group.push(
            eps_targets
                .iter()
                .map(|&e| {
                    run.iter()
                        .find(|r| r.f_gap <= e)
                        .map_or(f64::INFINITY, |r| r.oracle_calls as f64)
                })
                .collect(),
        );
    }
    if let Some(l) = &last {
        flush(&mut table, &mut group, l);
    }
    ComplexityTable {
        eps: eps_targets.to_vec(),
        rows: table,
    }
}

/// Median with the usual even-length average; `+∞` propagates.
pub fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        let (a, b) = (v[n / 2 - 1], v[n / 2]);
        if b.is_infinite() {
            b
        } else {
            0.5 * (a + b)
        }
    })
}
