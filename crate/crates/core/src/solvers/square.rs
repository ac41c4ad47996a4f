use serde::{Deserialize, Serialize};

use super::config::ConfigError;
use super::{check_len, SolverError};
use crate::linesearch::{golden_ratio_search, LineOracle, LineSearchError};
use crate::oracle::{ComparisonOracle, Direction, OracleError, Sign3};

/// Axis-aligned square `center ± half_side`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Square2D {
    pub center: [f64; 2],
    pub half_side: f64,
}

impl Square2D {
    pub fn new(center: [f64; 2], half_side: f64) -> Result<Self, ConfigError> {
        if !(half_side.is_finite() && half_side > 0.0) {
            return Err(ConfigError::NotPositive {
                field: "half_side",
                value: half_side,
            });
        }
        Ok(Self { center, half_side })
    }

    pub fn side(&self) -> f64 {
        2.0 * self.half_side
    }

    pub fn area(&self) -> f64 {
        self.side() * self.side()
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|j| (p[j] - self.center[j]).abs() <= self.half_side)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareHalvingConfig {
    /// Target accuracy in function value.
    pub eps: f64,
    /// Argument tolerance of each golden-ratio line search.
    pub inner_tol: f64,
    /// Lipschitz constant of `f` on the initial square; fixes the number of
    /// rounds `⌈log₂(L·R/ε)⌉` with `R` the side length.
    pub lipschitz: f64,
    /// Gradient probes use the offset `probe_ratio · half_side`.
    pub probe_ratio: f64,
}

impl SquareHalvingConfig {
    pub fn new(eps: f64, inner_tol: f64, lipschitz: f64) -> Self {
        Self {
            eps,
            inner_tol,
            lipschitz,
            probe_ratio: 1e-3,
        }
    }

    pub fn rounds_for(&self, square: &Square2D) -> u32 {
        let ratio = self.lipschitz * square.side() / self.eps;
        if ratio <= 1.0 {
            0
        } else {
            ratio.log2().ceil() as u32
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (field, value) in [
            ("eps", self.eps),
            ("inner_tol", self.inner_tol),
            ("lipschitz", self.lipschitz),
            ("probe_ratio", self.probe_ratio),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::NotPositive { field, value });
            }
        }
        Ok(())
    }
}

/// One horizontal + vertical cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareRound {
    /// Line minimizers found on the horizontal and the vertical cut.
    pub line_points: [[f64; 2]; 2],
    /// Probe answers `compare(p + t·n, p - t·n)` for both cuts.
    pub probes: [Sign3; 2],
    /// The half-size rectangle left after the horizontal cut, as
    /// `(lower-left, upper-right)`.
    pub rectangle: ([f64; 2], [f64; 2]),
    /// The square left after the round.
    pub square: Square2D,
    pub oracle_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareHalvingResult {
    pub point: [f64; 2],
    pub rounds: Vec<SquareRound>,
    pub oracle_calls: u64,
}

/// Comparison-only minimization on a square in the plane: search along the
/// horizontal center line, probe the sign of `∂f/∂y` at the line minimizer
/// with one symmetric comparison and drop the half the gradient points
/// into; repeat with a vertical line on the remaining rectangle. Every round
/// halves the side. Ties keep the lower (resp. left) half.
pub fn square_halving_2d<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    sq0: Square2D,
    cfg: &SquareHalvingConfig,
) -> Result<SquareHalvingResult, SolverError> {
    square_halving_2d_observed(oracle, sq0, cfg, |_| {})
}

/// [`square_halving_2d`] that reports each finished round as it happens, so
/// callers still see progress when a later comparison fails.
pub fn square_halving_2d_observed<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    sq0: Square2D,
    cfg: &SquareHalvingConfig,
    mut observe: impl FnMut(&SquareRound),
) -> Result<SquareHalvingResult, SolverError> {
    cfg.validate()?;
    Square2D::new(sq0.center, sq0.half_side)?;
    check_len("oracle", 2, oracle.dim())?;
    let n_rounds = cfg.rounds_for(&sq0);
    let start = oracle.call_count();
    let mut sq = sq0;
    let mut rounds = Vec::with_capacity(n_rounds as usize);
    for _ in 0..n_rounds {
        let h = sq.half_side;
        let t = cfg.probe_ratio * h;
        let [cx, cy] = sq.center;

        // horizontal cut through the center: y = cy, x in [cx - h, cx + h]
        let p1 = line_min(oracle, [cx, cy], 0, h, cfg.inner_tol)?;
        let s1 = probe(oracle, p1, 1, t)?;
        let y_lo = if s1 == Sign3::Minus { cy } else { cy - h };
        let rectangle = ([cx - h, y_lo], [cx + h, y_lo + h]);

        // vertical cut through the rectangle's center: x = cx
        let cy2 = y_lo + 0.5 * h;
        let p2 = line_min(oracle, [cx, cy2], 1, 0.5 * h, cfg.inner_tol)?;
        let s2 = probe(oracle, p2, 0, t)?;
        let x_lo = if s2 == Sign3::Minus { cx } else { cx - h };

        sq = Square2D {
            center: [x_lo + 0.5 * h, cy2],
            half_side: 0.5 * h,
        };
        let round = SquareRound {
            line_points: [p1, p2],
            probes: [s1, s2],
            rectangle,
            square: sq,
            oracle_calls: oracle.call_count() - start,
        };
        observe(&round);
        rounds.push(round);
    }
    Ok(SquareHalvingResult {
        point: sq.center,
        rounds,
        oracle_calls: oracle.call_count() - start,
    })
}

fn line_min<O: ComparisonOracle + ?Sized>(
    oracle: &mut O,
    base: [f64; 2],
    axis: usize,
    half_len: f64,
    tol: f64,
) -> Result<[f64; 2], SolverError> {
    let mut line = LineOracle::new(&mut *oracle, &base, Direction::Coordinate(axis));
    let res = golden_ratio_search(&mut line, (-half_len, half_len), tol).map_err(SolverError::LineSearch)?;
    let mut p = base;
    p[axis] += res.eta_hat;
    Ok(p)
}

/// `compare(p + t·e_axis, p - t·e_axis)`: the sign of the partial
/// derivative along `axis` (exact for quadratics).
fn probe<O: ComparisonOracle + ?Sized>(oracle: &mut O, p: [f64; 2], axis: usize, t: f64) -> Result<Sign3, SolverError> {
    oracle
        .compare_on_line(&p, Direction::Coordinate(axis), t, -t)
        .map_err(|e: OracleError| SolverError::LineSearch(LineSearchError::Oracle(e)))
}
