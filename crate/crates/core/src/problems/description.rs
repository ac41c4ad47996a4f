use serde::{Deserialize, Serialize};

use super::{make_quadratic, ProblemError, QuadraticProblem};
use crate::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSpec {
    /// `d` eigenvalues spaced geometrically from `lo` to `hi`.
    LogUniform { lo: f64, hi: f64 },
    Constant { value: f64 },
    Explicit { values: Vec<f64> },
}

/// Reproducible description of a quadratic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDescription {
    pub dim: usize,
    pub spectrum: SpectrumSpec,
    /// Seed of the random rotation; `None` keeps `A` diagonal.
    #[serde(default)]
    pub rotation_seed: Option<u64>,
    /// Seed for `b`.
    #[serde(default)]
    pub data_seed: u64,
}

impl Default for ProblemDescription {
    /// The benchmark instance: d = 100, condition number 10⁴.
    fn default() -> Self {
        Self {
            dim: 100,
            spectrum: SpectrumSpec::LogUniform { lo: 1.0, hi: 1e4 },
            rotation_seed: Some(2024),
            data_seed: 7,
        }
    }
}

impl ProblemDescription {
    pub fn eigenvalues(&self) -> Result<Vec<f64>, ProblemError> {
        let d = self.dim;
        if d == 0 {
            return Err(ProblemError::Empty);
        }
        let values = match &self.spectrum {
            SpectrumSpec::LogUniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && hi >= lo) {
                    return Err(ProblemError::BadSpectrum);
                }
                if d == 1 {
                    vec![*lo]
                } else {
                    let ratio = hi / lo;
                    (0..d).map(|j| lo * ratio.powf(j as f64 / (d - 1) as f64)).collect()
                }
            }
            SpectrumSpec::Constant { value } => vec![*value; d],
            SpectrumSpec::Explicit { values } => values.clone(),
        };
        if values.len() != d {
            return Err(ProblemError::BadSpectrum);
        }
        Ok(values)
    }

    pub fn build(&self) -> Result<QuadraticProblem, ProblemError> {
        let eig = self.eigenvalues()?;
        make_quadratic(self.dim, &eig, self.rotation_seed, &mut Rng::new(self.data_seed))
    }
}
