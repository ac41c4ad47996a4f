use std::path::Path;

use orderopt::problems::{acdm_baseline, gd_baseline, rcd_baseline, QuadraticProblem};
use orderopt::solvers::{order_acdm, order_rcd};
use orderopt::{NoiseModel, SolverConfig, SolverTrace, TerminalStatus};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, SolverEntry, SolverKind};
use crate::trace::{TraceFile, TraceRow};
use crate::BenchError;

/// A cell that did not complete normally. Its partial trace, if any, is
/// still written.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub solver: String,
    pub seed: u64,
    pub delta: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    /// One file per (solver, Δ), in config order.
    pub files: Vec<TraceFile>,
    pub failures: Vec<CellFailure>,
}

impl ExperimentOutcome {
    pub fn all_rows(&self) -> Vec<TraceRow> {
        self.files.iter().flat_map(|f| f.rows.iter().cloned()).collect()
    }

    /// Writes `<stem>.csv` and `<stem>.dat` for every file plus
    /// `failures.json`. Existing files with those names are replaced.
    pub fn write(&self, dir: &Path) -> Result<(), BenchError> {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
        for f in &self.files {
            let csv = dir.join(format!("{}.csv", f.file_stem()));
            std::fs::write(&csv, f.to_csv()?).map_err(|e| BenchError::io(&csv, e))?;
            let dat = dir.join(format!("{}.dat", f.file_stem()));
            std::fs::write(&dat, f.to_gnuplot()).map_err(|e| BenchError::io(&dat, e))?;
        }
        let path = dir.join("failures.json");
        let json = serde_json::to_string_pretty(&self.failures)?;
        std::fs::write(&path, json + "\n").map_err(|e| BenchError::io(&path, e))?;
        Ok(())
    }
}

struct Cell<'a> {
    entry: &'a SolverEntry,
    seed: u64,
    delta: f64,
}

/// Runs every (solver, seed, Δ) cell on the global rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, BenchError> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    let x0 = cfg.start.materialize(problem.dim())?;
    let deltas = cfg.deltas();

    let mut cells = Vec::new();
    for entry in &cfg.solvers {
        for &delta in &deltas {
            for &seed in &cfg.seeds {
                cells.push(Cell { entry, seed, delta });
            }
        }
    }
    // `collect` on an indexed parallel iterator keeps input order, so the
    // merge below never depends on completion order.
    let results: Vec<Result<SolverTrace, String>> = cells
        .par_iter()
        .map(|c| run_cell(&problem, &x0, cfg.alpha, c))
        .collect();

    let mut files: Vec<TraceFile> = Vec::new();
    let mut failures = Vec::new();
    for (cell, result) in cells.iter().zip(results) {
        let solver = cell.entry.label().to_owned();
        let idx = match files
            .iter()
            .position(|f| f.solver == solver && f.delta.to_bits() == cell.delta.to_bits())
        {
            Some(i) => i,
            None => {
                files.push(TraceFile {
                    solver: solver.clone(),
                    delta: cell.delta,
                    rows: Vec::new(),
                });
                files.len() - 1
            }
        };
        let fail = |reason: String| CellFailure {
            solver: solver.clone(),
            seed: cell.seed,
            delta: cell.delta,
            reason,
        };
        match result {
            Ok(trace) => {
                match &trace.status {
                    TerminalStatus::Completed | TerminalStatus::TargetReached => {}
                    TerminalStatus::HitMaxExpansion => {
                        failures.push(fail(format!(
                            "line search could not bracket a minimum after iteration {}",
                            trace.iterations
                        )));
                    }
                    TerminalStatus::OracleFailed { error } => failures.push(fail(error.to_string())),
                }
                files[idx].rows.extend(trace.records.iter().map(|r| TraceRow {
                    solver: solver.clone(),
                    seed: cell.seed,
                    delta: cell.delta,
                    iteration: r.iteration,
                    oracle_calls: r.oracle_calls,
                    f_gap: r.f_gap.unwrap_or(f64::NAN),
                }));
            }
            Err(reason) => failures.push(fail(reason)),
        }
    }
    for f in &mut files {
        f.sort();
    }
    Ok(ExperimentOutcome { files, failures })
}

/// Same as [`run_experiment`] on a dedicated pool of `jobs` threads.
pub fn run_experiment_with_jobs(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentOutcome, BenchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| BenchError::InvalidArgument(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

fn run_cell(problem: &QuadraticProblem, x0: &[f64], alpha: f64, cell: &Cell<'_>) -> Result<SolverTrace, String> {
    let mut cfg: SolverConfig = cell.entry.config.clone();
    cfg.seed = cell.seed;
    let alpha = *cfg.alpha.get_or_insert(alpha);
    if matches!(cell.entry.kind, SolverKind::OrderAcdm | SolverKind::AcdmBaseline) && cfg.mu.is_none() {
        cfg.mu = Some(
            problem
                .mu_alpha(alpha)
                .ok_or_else(|| "cannot compute mu_alpha for this instance".to_owned())?,
        );
    }
    let noise = if cell.delta > 0.0 {
        NoiseModel::cos_sin(cell.delta)
    } else {
        NoiseModel::None
    };
    let gap = |x: &[f64]| problem.suboptimality(x);
    let result = match cell.entry.kind {
        SolverKind::OrderRcd | SolverKind::OrderAcdm => {
            let smoothness = problem.smoothness(alpha).map_err(|e| e.to_string())?;
            let mut oracle = problem.as_order_oracle(noise);
            if cell.entry.kind == SolverKind::OrderRcd {
                order_rcd(&mut oracle, &smoothness, x0, &cfg, Some(&gap))
            } else {
                order_acdm(&mut oracle, &smoothness, x0, &cfg, Some(&gap))
            }
        }
        SolverKind::GdBaseline => gd_baseline(problem, x0, &cfg),
        SolverKind::RcdBaseline => rcd_baseline(problem, x0, &cfg),
        SolverKind::AcdmBaseline => acdm_baseline(problem, x0, &cfg),
    };
    result.map_err(|e| e.to_string())
}
