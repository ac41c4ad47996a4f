//! Comparison-only one-dimensional minimization along a ray: symmetric
//! doubling to find a bracket, then the golden-ratio method.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{ComparisonOracle, Direction, OracleError, Sign3};

/// Golden ratio `Φ = (1 + √5) / 2`.
pub const PHI: f64 = 1.618_033_988_749_894_848_2;
/// Shrink factor `ρ = 1/Φ = (√5 - 1) / 2`.
pub const RHO: f64 = 0.618_033_988_749_894_848_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineSearchError {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("tolerance {0} must be finite and > 0")]
    InvalidTolerance(f64),
    #[error("initial radius {0} must be finite and > 0")]
    InvalidRadius(f64),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// The restriction of an order oracle to the line `base + η·dir`.
pub struct LineOracle<'a, O: ComparisonOracle + ?Sized> {
    oracle: &'a mut O,
    base: &'a [f64],
    dir: Direction<'a>,
}

impl<'a, O: ComparisonOracle + ?Sized> LineOracle<'a, O> {
    pub fn new(oracle: &'a mut O, base: &'a [f64], dir: Direction<'a>) -> Self {
        Self { oracle, base, dir }
    }

    /// `compare(base + s·dir, base + t·dir)`; one oracle call.
    pub fn compare_at(&mut self, s: f64, t: f64) -> Result<Sign3, OracleError> {
        self.oracle.compare_on_line(self.base, self.dir, s, t)
    }

    pub fn call_count(&self) -> u64 {
        self.oracle.call_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineSearchStatus {
    Converged,
    HitMaxExpansion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub status: LineSearchStatus,
    pub comparisons: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchResult {
    pub eta_hat: f64,
    /// Final interval `[a, b]`, containing `eta_hat`.
    pub bracket: (f64, f64),
    pub comparisons: u64,
    pub status: LineSearchStatus,
}

/// Symmetric doubling from radius `r0`: the radius doubles while either
/// boundary point is strictly better than the half-radius point on its side.
/// For a coercive unimodal slice the returned `[-r, r]` contains the slice
/// minimizer.
pub fn bracket_minimum<O: ComparisonOracle + ?Sized>(
    line: &mut LineOracle<'_, O>,
    r0: f64,
    max_doublings: u32,
) -> Result<Bracket, LineSearchError> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(LineSearchError::InvalidRadius(r0));
    }
    let start = line.call_count();
    let mut r = r0;
    let mut doublings = 0;
    loop {
        let expand = line.compare_at(r, r / 2.0)? == Sign3::Minus
            || line.compare_at(-r, -r / 2.0)? == Sign3::Minus;
        if !expand {
            return Ok(Bracket {
                lo: -r,
                hi: r,
                status: LineSearchStatus::Converged,
                comparisons: line.call_count() - start,
            });
        }
        if doublings == max_doublings {
            return Ok(Bracket {
                lo: -r,
                hi: r,
                status: LineSearchStatus::HitMaxExpansion,
                comparisons: line.call_count() - start,
            });
        }
        r *= 2.0;
        doublings += 1;
    }
}

/// Golden-ratio method on `[a, b]`: one comparison per iteration, the
/// interval shrinks by `ρ` each time, stop once `b - a <= tol` and return
/// the midpoint.
///
/// Ties take the "else" branch (the left probe is kept as the new left end).
pub fn golden_ratio_search<O: ComparisonOracle + ?Sized>(
    line: &mut LineOracle<'_, O>,
    interval: (f64, f64),
    tol: f64,
) -> Result<LineSearchResult, LineSearchError> {
    golden_ratio_search_observed(line, interval, tol, |_, _| {})
}

/// Like [`golden_ratio_search`], calling `observe(a, b)` after every shrink.
pub fn golden_ratio_search_observed<O: ComparisonOracle + ?Sized>(
    line: &mut LineOracle<'_, O>,
    (mut a, mut b): (f64, f64),
    tol: f64,
    mut observe: impl FnMut(f64, f64),
) -> Result<LineSearchResult, LineSearchError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(LineSearchError::InvalidInterval { a, b });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(LineSearchError::InvalidTolerance(tol));
    }
    let start = line.call_count();
    let mut y = a + (1.0 - RHO) * (b - a);
    let mut z = a + RHO * (b - a);
    while b - a > tol {
        if line.compare_at(y, z)? == Sign3::Minus {
            b = z;
            z = y;
            y = a + (1.0 - RHO) * (b - a);
        } else {
            a = y;
            y = z;
            z = a + RHO * (b - a);
        }
        observe(a, b);
    }
    Ok(LineSearchResult {
        eta_hat: 0.5 * (a + b),
        bracket: (a, b),
        comparisons: line.call_count() - start,
        status: LineSearchStatus::Converged,
    })
}

/// Line-search settings shared by the coordinate solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub tol: f64,
    pub r0: f64,
    pub max_doublings: u32,
}

/// Outcome of bracket + golden-ratio search + acceptance guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardedStep {
    /// Accepted step; `0` when the candidate was rejected.
    pub eta: f64,
    /// What the golden-ratio method returned.
    pub candidate: f64,
    pub accepted: bool,
    pub status: LineSearchStatus,
    pub comparisons: u64,
}

/// Minimizes along the line and keeps the result only if
/// `compare(base + η̂·dir, base) <= 0`, so the step never makes the point
/// worse according to the oracle.
pub fn guarded_line_step<O: ComparisonOracle + ?Sized>(
    line: &mut LineOracle<'_, O>,
    settings: SearchSettings,
) -> Result<GuardedStep, LineSearchError> {
    let start = line.call_count();
    let bracket = bracket_minimum(line, settings.r0, settings.max_doublings)?;
    if bracket.status == LineSearchStatus::HitMaxExpansion {
        return Ok(GuardedStep {
            eta: 0.0,
            candidate: 0.0,
            accepted: false,
            status: LineSearchStatus::HitMaxExpansion,
            comparisons: line.call_count() - start,
        });
    }
    let found = golden_ratio_search(line, (bracket.lo, bracket.hi), settings.tol)?;
    let accepted = line.compare_at(found.eta_hat, 0.0)? != Sign3::Plus;
    Ok(GuardedStep {
        eta: if accepted { found.eta_hat } else { 0.0 },
        candidate: found.eta_hat,
        accepted,
        status: LineSearchStatus::Converged,
        comparisons: line.call_count() - start,
    })
}
