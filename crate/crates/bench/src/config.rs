use std::collections::HashSet;
use std::path::{Path, PathBuf};

use orderopt::problems::ProblemDescription;
use orderopt::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    OrderRcd,
    OrderAcdm,
    /// Full-gradient descent with step `1/L`.
    GdBaseline,
    /// Coordinate descent with exact partial derivatives and steps `1/L_i`.
    RcdBaseline,
    /// Accelerated coordinate descent with exact partial derivatives.
    AcdmBaseline,
}

impl SolverKind {
    pub fn label(self) -> &'static str {
        match self {
            SolverKind::OrderRcd => "order_rcd",
            SolverKind::OrderAcdm => "order_acdm",
            SolverKind::GdBaseline => "gd_baseline",
            SolverKind::RcdBaseline => "rcd_baseline",
            SolverKind::AcdmBaseline => "acdm_baseline",
        }
    }

    /// Whether the run goes through a comparison oracle (and so feels Δ).
    pub fn uses_order_oracle(self) -> bool {
        matches!(self, SolverKind::OrderRcd | SolverKind::OrderAcdm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverEntry {
    pub kind: SolverKind,
    /// Label used in the CSV `solver` column and in file names. Defaults to
    /// the kind.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub config: SolverConfig,
}

impl SolverEntry {
    pub fn new(kind: SolverKind, config: SolverConfig) -> Self {
        Self {
            kind,
            name: None,
            config,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(self.kind.label())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StartPoint {
    #[default]
    Zeros,
    /// Every coordinate set to `value`.
    Fill { value: f64 },
    Explicit { values: Vec<f64> },
}

impl StartPoint {
    pub fn materialize(&self, dim: usize) -> Result<Vec<f64>, BenchError> {
        let x = match self {
            StartPoint::Zeros => vec![0.0; dim],
            StartPoint::Fill { value } => vec![*value; dim],
            StartPoint::Explicit { values } => values.clone(),
        };
        if x.len() != dim {
            return Err(BenchError::InvalidConfig(format!(
                "start point has {} coordinates, problem has {dim}",
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(BenchError::InvalidConfig("start point is not finite".into()));
        }
        Ok(x)
    }
}

/// One sweep: every solver × seed × Δ on a single quadratic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub problem: ProblemDescription,
    #[serde(default)]
    pub start: StartPoint,
    pub solvers: Vec<SolverEntry>,
    pub seeds: Vec<u64>,
    /// Noise levels for `δ = Δ·cos(x₀)·sin(y₀)`; empty means `[0]`.
    #[serde(default)]
    pub deltas: Vec<f64>,
    /// Sampling exponent used for the smoothness constants when a solver
    /// config does not set its own.
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn deltas(&self) -> Vec<f64> {
        if self.deltas.is_empty() {
            vec![0.0]
        } else {
            self.deltas.clone()
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return bad(format!("noise level {d} must be finite and non-negative"));
        }
        let mut labels = HashSet::new();
        for s in &self.solvers {
            let label = s.label();
            if label.is_empty() || label.contains(['/', '\\', ',']) {
                return bad(format!("solver name {label:?} is not usable as a file name"));
            }
            if !labels.insert(label.to_owned()) {
                return bad(format!("duplicate solver name {label:?}"));
            }
            s.config
                .validate()
                .map_err(|e| BenchError::InvalidConfig(format!("{label}: {e}")))?;
        }
        self.start.materialize(self.problem.dim)?;
        Ok(())
    }
}
