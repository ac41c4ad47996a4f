use serde::{Deserialize, Serialize};

use super::config::TraceOptions;
use super::GapMonitor;
use crate::oracle::OracleError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    /// Oracle calls consumed up to and including this iteration.
    pub oracle_calls: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerminalStatus {
    /// Ran for `max_iterations`.
    Completed,
    /// The gap monitor went below `trace.stop_below`.
    TargetReached,
    /// A line search could not bracket a minimum (unbounded slice or
    /// pathological noise).
    HitMaxExpansion,
    /// The oracle refused to answer. For interactive oracles this is how a
    /// run pauses for the next human answer.
    OracleFailed { error: OracleError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    pub status: TerminalStatus,
    /// Iterations completed.
    pub iterations: u64,
    pub oracle_calls: u64,
    pub final_iterate: Vec<f64>,
}

impl SolverTrace {
    /// First recorded iteration whose gap is `<= eps`.
    pub fn first_below(&self, eps: f64) -> Option<&TraceRecord> {
        self.records
            .iter()
            .find(|r| r.f_gap.is_some_and(|g| g <= eps))
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.f_gap)
    }
}

/// Shared bookkeeping for the iterative solvers.
pub(crate) struct Recorder<'a> {
    options: TraceOptions,
    max_iterations: u64,
    gap: Option<GapMonitor<'a>>,
    records: Vec<TraceRecord>,
    seed: u64,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(options: &TraceOptions, max_iterations: u64, seed: u64, gap: Option<GapMonitor<'a>>) -> Self {
        Self {
            options: options.clone(),
            max_iterations,
            gap,
            records: Vec::new(),
            seed,
        }
    }

    /// Records iteration `k` when due; returns `true` once the gap target is
    /// reached (which forces a record).
    pub(crate) fn observe(&mut self, k: u64, oracle_calls: u64, x: &[f64]) -> bool {
        let due = k == 0 || k == self.max_iterations || k.is_multiple_of(self.options.every);
        let needs_gap = due || self.options.stop_below.is_some();
        let gap = if needs_gap { self.gap.map(|g| g(x)) } else { None };
        let reached = matches!((gap, self.options.stop_below), (Some(g), Some(t)) if g <= t);
        if due || reached {
            self.push(k, oracle_calls, x, gap);
        }
        reached
    }

    fn push(&mut self, k: u64, oracle_calls: u64, x: &[f64], gap: Option<f64>) {
        if self.records.last().is_some_and(|r| r.iteration == k) {
            return;
        }
        self.records.push(TraceRecord {
            iteration: k,
            oracle_calls,
            f_gap: gap,
            iterate: self.options.iterates.then(|| x.to_vec()),
        });
    }

    pub(crate) fn finish(mut self, k: u64, oracle_calls: u64, x: &[f64], status: TerminalStatus) -> SolverTrace {
        let gap = self.gap.map(|g| g(x));
        self.push(k, oracle_calls, x, gap);
        SolverTrace {
            seed: self.seed,
            records: self.records,
            status,
            iterations: k,
            oracle_calls,
            final_iterate: x.to_vec(),
        }
    }
}
