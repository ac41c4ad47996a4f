use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::BenchError;

pub const TRACE_HEADER: &str = "solver,seed,delta,iteration,oracle_calls,f_gap";

/// One CSV line. Field order is the header order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub solver: String,
    pub seed: u64,
    pub delta: f64,
    pub iteration: u64,
    pub oracle_calls: u64,
    pub f_gap: f64,
}

/// Identifies one run inside a set of rows. `delta` is kept as raw bits so
/// the key is totally ordered (noise levels are non-negative, so the bit
/// order is the numeric order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RunKey {
    pub solver: String,
    pub delta_bits: u64,
    pub seed: u64,
}

impl RunKey {
    pub fn of(row: &TraceRow) -> Self {
        Self {
            solver: row.solver.clone(),
            delta_bits: row.delta.to_bits(),
            seed: row.seed,
        }
    }

    pub fn delta(&self) -> f64 {
        f64::from_bits(self.delta_bits)
    }
}

/// All rows for one (solver, Δ) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub solver: String,
    pub delta: f64,
    pub rows: Vec<TraceRow>,
}

impl TraceFile {
    pub fn file_stem(&self) -> String {
        format!("{}_delta_{}", self.solver, self.delta)
    }

    /// Sorts rows by (solver, seed, iteration).
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.solver.as_str(), a.seed, a.iteration).cmp(&(b.solver.as_str(), b.seed, b.iteration))
        });
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            // The serializer only emits the header alongside a first record.
            return Ok(format!("{TRACE_HEADER}\n").into_bytes());
        }
        w.into_inner().map_err(|e| BenchError::Csv(e.into_error().into()))
    }

    /// gnuplot data layout: one block per seed, blocks separated by two
    /// blank lines so `index n` selects seed n.
    pub fn to_gnuplot(&self) -> String {
        let mut out = format!("# solver {} delta {}\n# iteration oracle_calls f_gap\n", self.solver, self.delta);
        let mut current = None;
        for row in &self.rows {
            if current != Some(row.seed) {
                if current.is_some() {
                    out.push_str("\n\n");
                }
                let _ = writeln!(out, "# seed {}", row.seed);
                current = Some(row.seed);
            }
            let _ = writeln!(out, "{} {} {:e}", row.iteration, row.oracle_calls, row.f_gap);
        }
        out
    }
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>, BenchError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| BenchError::Csv(e))?;
    let header: Vec<&str> = r.headers()?.iter().collect();
    if header.join(",") != TRACE_HEADER {
        return Err(BenchError::BadTrace {
            path: path.to_owned(),
            reason: format!("header {:?} is not {TRACE_HEADER:?}", header.join(",")),
        });
    }
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Reads every `*.csv` under `dir` (not recursive), in file-name order.
pub fn read_trace_dir(dir: &Path) -> Result<Vec<TraceRow>, BenchError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| BenchError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(BenchError::BadTrace {
            path: dir.to_owned(),
            reason: "no .csv traces found".into(),
        });
    }
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_trace_csv(&p)?);
    }
    Ok(rows)
}

/// Groups rows into runs, each sorted by iteration.
pub fn group_runs(rows: &[TraceRow]) -> BTreeMap<RunKey, Vec<&TraceRow>> {
    let mut runs: BTreeMap<RunKey, Vec<&TraceRow>> = BTreeMap::new();
    for row in rows {
        runs.entry(RunKey::of(row)).or_default().push(row);
    }
    for run in runs.values_mut() {
        run.sort_by_key(|r| r.iteration);
    }
    runs
}
