//! Coordinate-smoothness constants and the two samplers the solvers need:
//! the coordinate distribution `p_α(i) = L_i^α / S_α` and the uniform
//! distribution on the Euclidean unit sphere.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Rng, Vector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmoothnessError {
    #[error("at least one coordinate constant is required")]
    Empty,
    #[error("coordinate constant L[{index}] = {value} must be finite and > 0")]
    NonPositive { index: usize, value: f64 },
    #[error("exponent alpha = {0} must lie in [0, 1]")]
    AlphaOutOfRange(f64),
}

/// Per-coordinate Lipschitz constants `L_i` of the partial derivatives
/// together with the sampling exponent `alpha ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSmoothness", into = "RawSmoothness")]
pub struct CoordinateSmoothness {
    lipschitz: Vec<f64>,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSmoothness {
    lipschitz: Vec<f64>,
    alpha: f64,
}

impl TryFrom<RawSmoothness> for CoordinateSmoothness {
    type Error = SmoothnessError;
    fn try_from(raw: RawSmoothness) -> Result<Self, Self::Error> {
        Self::new(raw.lipschitz, raw.alpha)
    }
}

impl From<CoordinateSmoothness> for RawSmoothness {
    fn from(s: CoordinateSmoothness) -> Self {
        Self {
            lipschitz: s.lipschitz,
            alpha: s.alpha,
        }
    }
}

impl CoordinateSmoothness {
    pub fn new(lipschitz: Vec<f64>, alpha: f64) -> Result<Self, SmoothnessError> {
        if lipschitz.is_empty() {
            return Err(SmoothnessError::Empty);
        }
        if let Some((index, &value)) = lipschitz
            .iter()
            .enumerate()
            .find(|(_, l)| !(l.is_finite() && **l > 0.0))
        {
            return Err(SmoothnessError::NonPositive { index, value });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SmoothnessError::AlphaOutOfRange(alpha));
        }
        Ok(Self { lipschitz, alpha })
    }

    /// All `L_i = 1`; with `alpha = 0` this is plain uniform sampling.
    pub fn uniform(dim: usize) -> Result<Self, SmoothnessError> {
        Self::new(vec![1.0; dim], 0.0)
    }

    pub fn dim(&self) -> usize {
        self.lipschitz.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lipschitz(&self) -> &[f64] {
        &self.lipschitz
    }

    /// Same constants, different exponent.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, SmoothnessError> {
        Self::new(self.lipschitz.clone(), alpha)
    }

    /// `L_i^e` with the convention `L^0 = 1` exactly.
    pub fn weight(&self, i: usize, exponent: f64) -> f64 {
        if exponent == 0.0 {
            1.0
        } else {
            self.lipschitz[i].powf(exponent)
        }
    }

    /// `S_e = Σ_i L_i^e` for an arbitrary exponent.
    pub fn power_sum(&self, exponent: f64) -> f64 {
        (0..self.dim()).map(|i| self.weight(i, exponent)).sum()
    }

    /// `S_α = Σ_i L_i^α`.
    pub fn s_alpha(&self) -> f64 {
        self.power_sum(self.alpha)
    }

    /// `p_α(i) = L_i^α / S_α`.
    pub fn coordinate_distribution(&self) -> CoordinateDistribution {
        self.distribution_for(self.alpha)
    }

    /// Distribution `L_i^e / S_e` for another exponent (OrderACDM samples
    /// with `β = α / 2`).
    pub fn distribution_for(&self, exponent: f64) -> CoordinateDistribution {
        let weights: Vec<f64> = (0..self.dim()).map(|i| self.weight(i, exponent)).collect();
        CoordinateDistribution::from_weights(&weights)
            .expect("positive weights always form a distribution")
    }
}

/// Discrete distribution over coordinates, sampled by CDF inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateDistribution {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl CoordinateDistribution {
    /// Normalizes nonnegative weights. `None` if the weights are empty,
    /// negative, non-finite or all zero.
    pub fn from_weights(weights: &[f64]) -> Option<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return None;
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Some(Self { probs, cumulative })
    }

    pub fn uniform(dim: usize) -> Self {
        Self::from_weights(&vec![1.0; dim]).expect("dim >= 1")
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Draws `i` with probability `p_i` (binary search on the CDF).
    pub fn sample(&self, rng: &mut Rng) -> usize {
        let u = rng.uniform();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        if idx < self.probs.len() {
            idx
        } else {
            // u fell into the rounding gap above the last cumulative value
            self.probs
                .iter()
                .rposition(|&p| p > 0.0)
                .expect("at least one positive probability")
        }
    }
}

/// Uniform sample from the unit sphere in `R^d`: a standard normal vector,
/// normalized.
pub fn sample_unit_sphere(dim: usize, rng: &mut Rng) -> Vector {
    assert!(dim >= 1, "sphere dimension must be at least 1");
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.standard_normal());
        let norm = v.norm();
        if norm > 1e-300 {
            return v / norm;
        }
    }
}
