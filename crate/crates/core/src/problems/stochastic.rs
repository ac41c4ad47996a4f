use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::QuadraticProblem;
use crate::oracle::StochasticObjective;
use crate::{Rng, Vector};

/// How a realization `ξ ~ N(0, σ² I)` enters the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealizationModel {
    /// `f(x, ξ) = f(x) + ⟨ξ, x⟩`; the mean is exactly `f`.
    Additive { sigma: f64 },
    /// `f(x, ξ) = f* + ½ (x - x* - ξ)ᵀ A (x - x* - ξ)`; the mean is
    /// `f(x) + ½ σ² tr(A)`.
    ShiftedCenter { sigma: f64 },
}

/// A quadratic observed through random realizations.
#[derive(Debug, Clone)]
pub struct StochasticQuadratic {
    base: QuadraticProblem,
    model: RealizationModel,
}

impl StochasticQuadratic {
    pub fn new(base: QuadraticProblem, model: RealizationModel) -> Self {
        Self { base, model }
    }

    pub fn base(&self) -> &QuadraticProblem {
        &self.base
    }

    pub fn model(&self) -> RealizationModel {
        self.model
    }

    /// `E_ξ f(x, ξ) - f(x)`, independent of `x`.
    pub fn mean_offset(&self) -> f64 {
        match self.model {
            RealizationModel::Additive { .. } => 0.0,
            RealizationModel::ShiftedCenter { sigma } => 0.5 * sigma * sigma * self.base.a().trace(),
        }
    }

    fn sigma(&self) -> f64 {
        match self.model {
            RealizationModel::Additive { sigma } | RealizationModel::ShiftedCenter { sigma } => sigma,
        }
    }
}

impl StochasticObjective for StochasticQuadratic {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn sample_realization(&self, rng: &mut Rng) -> Vector {
        let sigma = self.sigma();
        DVector::from_fn(self.base.dim(), |_, _| sigma * rng.standard_normal())
    }

    fn value(&self, x: &[f64], xi: &[f64]) -> f64 {
        match self.model {
            RealizationModel::Additive { .. } => {
                self.base.eval(x) + x.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>()
            }
            RealizationModel::ShiftedCenter { .. } => {
                let e = DVector::from_column_slice(x) - self.base.x_star() - DVector::from_column_slice(xi);
                self.base.f_star() + 0.5 * e.dot(&(self.base.a() * &e))
            }
        }
    }

    fn gradient(&self, x: &[f64], xi: &[f64]) -> Option<Vector> {
        let xi = DVector::from_column_slice(xi);
        Some(match self.model {
            RealizationModel::Additive { .. } => self.base.gradient(x) + xi,
            RealizationModel::ShiftedCenter { .. } => {
                self.base.a() * (DVector::from_column_slice(x) - self.base.x_star() - xi)
            }
        })
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.base.lambda_max())
    }
}
