//! The only channel through which solvers see an objective: ternary order
//! comparisons.
//!
//! [`OrderOracle`] answers `sign(f(x) - f(y) + δ(x, y))` for a deterministic
//! bounded perturbation `δ` ([`NoiseModel`]); [`StochasticOrderOracle`]
//! answers `sign(f(x, ξ) - f(y, ξ))` with both points evaluated on one
//! freshly drawn realization `ξ`. Both count every comparison.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Rng, Vector};

/// Result of one comparison. `sign(0) = 0`: exact ties are reported, and
/// every consumer states how it breaks them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign3 {
    Minus,
    Zero,
    Plus,
}

impl Sign3 {
    /// Sign of a finite real; `0.0` and `-0.0` map to [`Sign3::Zero`].
    pub fn of(value: f64) -> Self {
        if value > 0.0 {
            Sign3::Plus
        } else if value < 0.0 {
            Sign3::Minus
        } else {
            Sign3::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign3::Minus => -1,
            Sign3::Zero => 0,
            Sign3::Plus => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_i8())
    }
}

impl std::ops::Neg for Sign3 {
    type Output = Sign3;
    fn neg(self) -> Sign3 {
        match self {
            Sign3::Minus => Sign3::Plus,
            Sign3::Zero => Sign3::Zero,
            Sign3::Plus => Sign3::Minus,
        }
    }
}

impl From<Sign3> for i8 {
    fn from(s: Sign3) -> i8 {
        s.as_i8()
    }
}

impl TryFrom<i8> for Sign3 {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            -1 => Ok(Sign3::Minus),
            0 => Ok(Sign3::Zero),
            1 => Ok(Sign3::Plus),
            other => Err(format!("{other} is not one of -1, 0, 1")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleError {
    #[error("point has dimension {got}, objective expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("objective returned a non-finite value")]
    NonFinite,
    /// Raised by oracles backed by an external answerer (e.g. a human) when
    /// the next answer is not available yet.
    #[error("comparison is waiting for an answer")]
    Suspended { first: Vec<f64>, second: Vec<f64> },
}

/// Bounded perturbation added to the function difference before the sign
/// is taken. Pure function of the two points: repeating a comparison
/// repeats the answer.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    #[default]
    None,
    /// `δ(x, y) = Δ · cos(x_c) · sin(y_c)` on coordinate `c` (default 0).
    CosSin {
        delta_max: f64,
        #[serde(default)]
        coordinate: usize,
    },
}

impl NoiseModel {
    pub fn cos_sin(delta_max: f64) -> Self {
        NoiseModel::CosSin {
            delta_max,
            coordinate: 0,
        }
    }

    /// Upper bound `Δ` on `|δ|`.
    pub fn bound(&self) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::CosSin { delta_max, .. } => *delta_max,
        }
    }

    pub fn delta(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::CosSin {
                delta_max,
                coordinate,
            } => delta_max * x[coordinate].cos() * y[coordinate].sin(),
        }
    }

    fn delta_on_line(&self, base: &[f64], dir: Direction<'_>, s: f64, t: f64) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::CosSin {
                delta_max,
                coordinate,
            } => {
                let xc = dir.component(base, s, coordinate);
                let yc = dir.component(base, t, coordinate);
                delta_max * xc.cos() * yc.sin()
            }
        }
    }
}

/// A line direction: either a unit coordinate vector or a dense vector.
#[derive(Debug, Clone, Copy)]
pub enum Direction<'a> {
    Coordinate(usize),
    Dense(&'a [f64]),
}

impl Direction<'_> {
    /// `base + step · dir`.
    pub fn point(&self, base: &[f64], step: f64) -> Vec<f64> {
        let mut p = base.to_vec();
        match *self {
            Direction::Coordinate(i) => p[i] += step,
            Direction::Dense(d) => p.iter_mut().zip(d).for_each(|(pi, di)| *pi += step * di),
        }
        p
    }

    /// Component `index` of `base + step · dir`.
    pub fn component(&self, base: &[f64], step: f64, index: usize) -> f64 {
        match *self {
            Direction::Coordinate(i) if i == index => base[index] + step,
            Direction::Coordinate(_) => base[index],
            Direction::Dense(d) => base[index] + step * d[index],
        }
    }
}

/// A deterministic objective. Solvers never hold one directly; it is
/// wrapped by an [`OrderOracle`].
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// `f(base + s·dir) - f(base + t·dir)`. Objectives with cheap line
    /// restrictions (quadratics) override this.
    fn difference_on_line(&self, base: &[f64], dir: Direction<'_>, s: f64, t: f64) -> f64 {
        self.value(&dir.point(base, s)) - self.value(&dir.point(base, t))
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn difference_on_line(&self, base: &[f64], dir: Direction<'_>, s: f64, t: f64) -> f64 {
        (**self).difference_on_line(base, dir, s, t)
    }
}

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn difference_on_line(&self, base: &[f64], dir: Direction<'_>, s: f64, t: f64) -> f64 {
        (**self).difference_on_line(base, dir, s, t)
    }
}

/// Adapts a closure into an [`Objective`].
#[derive(Clone)]
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Anything that answers order comparisons. Solvers are generic over this.
pub trait ComparisonOracle {
    fn dim(&self) -> usize;

    /// `sign(f(x) - f(y) + δ)`.
    fn compare(&mut self, x: &[f64], y: &[f64]) -> Result<Sign3, OracleError>;

    /// Compares `base + s·dir` against `base + t·dir`.
    fn compare_on_line(
        &mut self,
        base: &[f64],
        dir: Direction<'_>,
        s: f64,
        t: f64,
    ) -> Result<Sign3, OracleError> {
        let x = dir.point(base, s);
        let y = dir.point(base, t);
        self.compare(&x, &y)
    }

    /// Total comparisons answered so far.
    fn call_count(&self) -> u64;
}

impl<T: ComparisonOracle + ?Sized> ComparisonOracle for &mut T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn compare(&mut self, x: &[f64], y: &[f64]) -> Result<Sign3, OracleError> {
        (**self).compare(x, y)
    }
    fn compare_on_line(
        &mut self,
        base: &[f64],
        dir: Direction<'_>,
        s: f64,
        t: f64,
    ) -> Result<Sign3, OracleError> {
        (**self).compare_on_line(base, dir, s, t)
    }
    fn call_count(&self) -> u64 {
        (**self).call_count()
    }
}

fn check_dim(expected: usize, got: usize) -> Result<(), OracleError> {
    if expected == got {
        Ok(())
    } else {
        Err(OracleError::DimensionMismatch { expected, got })
    }
}

fn finite(v: f64) -> Result<f64, OracleError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(OracleError::NonFinite)
    }
}

/// Deterministic order oracle with bounded noise.
#[derive(Debug, Clone)]
pub struct OrderOracle<F> {
    objective: F,
    noise: NoiseModel,
    calls: u64,
}

impl<F: Objective> OrderOracle<F> {
    pub fn new(objective: F, noise: NoiseModel) -> Self {
        Self {
            objective,
            noise,
            calls: 0,
        }
    }

    pub fn exact(objective: F) -> Self {
        Self::new(objective, NoiseModel::None)
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }
}

impl<F: Objective> ComparisonOracle for OrderOracle<F> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn compare(&mut self, x: &[f64], y: &[f64]) -> Result<Sign3, OracleError> {
        let d = self.objective.dim();
        check_dim(d, x.len())?;
        check_dim(d, y.len())?;
        let fx = finite(self.objective.value(x))?;
        let fy = finite(self.objective.value(y))?;
        self.calls += 1;
        Ok(Sign3::of(fx - fy + self.noise.delta(x, y)))
    }

    fn compare_on_line(
        &mut self,
        base: &[f64],
        dir: Direction<'_>,
        s: f64,
        t: f64,
    ) -> Result<Sign3, OracleError> {
        check_dim(self.objective.dim(), base.len())?;
        if let Direction::Dense(d) = dir {
            check_dim(base.len(), d.len())?;
        }
        let diff = finite(self.objective.difference_on_line(base, dir, s, t))?;
        self.calls += 1;
        Ok(Sign3::of(diff + self.noise.delta_on_line(base, dir, s, t)))
    }

    fn call_count(&self) -> u64 {
        self.calls
    }
}

/// An objective indexed by a random realization `ξ`; the target is
/// `E_ξ f(x, ξ)`.
pub trait StochasticObjective {
    fn dim(&self) -> usize;

    fn sample_realization(&self, rng: &mut Rng) -> Vector;

    fn value(&self, x: &[f64], xi: &[f64]) -> f64;

    /// White-box gradient of `f(·, ξ)`; only benchmarks use it.
    fn gradient(&self, _x: &[f64], _xi: &[f64]) -> Option<Vector> {
        None
    }

    /// Smoothness constant `L` of every `f(·, ξ)`, when known.
    fn smoothness(&self) -> Option<f64> {
        None
    }
}

/// Stochastic order oracle: both arguments of a comparison are evaluated on
/// the same realization.
#[derive(Debug, Clone)]
pub struct StochasticOrderOracle<F> {
    objective: F,
    rng: Rng,
    calls: u64,
    realizations: Option<Vec<Vector>>,
}

impl<F: StochasticObjective> StochasticOrderOracle<F> {
    pub fn new(objective: F, rng: Rng) -> Self {
        Self {
            objective,
            rng,
            calls: 0,
            realizations: None,
        }
    }

    /// Keep every drawn realization (for replaying a run).
    pub fn recording(mut self) -> Self {
        self.realizations = Some(Vec::new());
        self
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn call_count(&self) -> u64 {
        self.calls
    }

    pub fn realizations(&self) -> Option<&[Vector]> {
        self.realizations.as_deref()
    }

    /// Draws the next realization (logged when recording).
    pub fn draw_realization(&mut self) -> Vector {
        let xi = self.objective.sample_realization(&mut self.rng);
        if let Some(log) = self.realizations.as_mut() {
            log.push(xi.clone());
        }
        xi
    }

    /// `sign(f(x, ξ) - f(y, ξ))` for a fresh `ξ`.
    pub fn compare_stochastic(&mut self, x: &[f64], y: &[f64]) -> Result<Sign3, OracleError> {
        let xi = self.draw_realization();
        self.compare_with(x, y, xi.as_slice())
    }

    /// `sign(f(x, ξ) - f(y, ξ))` for a given `ξ`.
    pub fn compare_with(&mut self, x: &[f64], y: &[f64], xi: &[f64]) -> Result<Sign3, OracleError> {
        let d = self.objective.dim();
        check_dim(d, x.len())?;
        check_dim(d, y.len())?;
        let fx = finite(self.objective.value(x, xi))?;
        let fy = finite(self.objective.value(y, xi))?;
        self.calls += 1;
        Ok(Sign3::of(fx - fy))
    }

    pub fn white_box_gradient(&self, x: &[f64], xi: &[f64]) -> Option<Vector> {
        self.objective.gradient(x, xi)
    }

    pub fn white_box_smoothness(&self) -> Option<f64> {
        self.objective.smoothness()
    }
}
