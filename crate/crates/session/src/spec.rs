use orderopt::solvers::SquareHalvingConfig;
use orderopt::SolverConfig;
use serde::{Deserialize, Serialize};

/// One tunable quantity, e.g. "milk %" in [0, 30].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionSolver {
    OrderRcd,
    OrderAcdm,
    /// Only for two parameters.
    SquareHalving,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSpec {
    pub params: Vec<ParamSpec>,
    pub solver: SessionSolver,
    #[serde(default)]
    pub config: SolverConfig,
    /// Settings for `square_halving`, in the solver's internal [-1, 1]²
    /// coordinates. Defaults to `eps = inner_tol = 1e-3`, `L = 1`.
    #[serde(default)]
    pub square: Option<SquareHalvingConfig>,
    /// Maximum number of answered comparisons.
    pub query_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub reason: String,
}

impl SessionSpec {
    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn square_config(&self) -> SquareHalvingConfig {
        self.square.unwrap_or(SquareHalvingConfig::new(1e-3, 1e-3, 1.0))
    }

    /// Every problem with the spec, not just the first.
    pub fn validate(&self) -> Result<(), Vec<FieldError>> {
        let mut errs = Vec::new();
        let mut err = |field: String, reason: &str| {
            errs.push(FieldError {
                field,
                reason: reason.to_owned(),
            })
        };
        if self.params.is_empty() {
            err("params".into(), "at least one parameter is required");
        }
        for (j, p) in self.params.iter().enumerate() {
            if p.name.trim().is_empty() {
                err(format!("params[{j}].name"), "must not be empty");
            }
            if !p.lower.is_finite() {
                err(format!("params[{j}].lower"), "must be finite");
            }
            if !p.upper.is_finite() {
                err(format!("params[{j}].upper"), "must be finite");
            }
            if p.lower.is_finite() && p.upper.is_finite() && p.lower >= p.upper {
                err(format!("params[{j}].upper"), "must be greater than lower");
            }
        }
        if self.query_budget == 0 {
            err("query_budget".into(), "must be positive");
        }
        if let Err(e) = self.config.validate() {
            err("config".into(), &e.to_string());
        }
        match self.solver {
            SessionSolver::OrderAcdm if self.config.mu.is_none() => {
                err("config.mu".into(), "order_acdm needs a strong-convexity estimate");
            }
            SessionSolver::SquareHalving if self.dim() != 2 => {
                err("solver".into(), "square_halving needs exactly two parameters");
            }
            _ => {}
        }
        if let Some(sq) = &self.square {
            for (name, v) in [
                ("eps", sq.eps),
                ("inner_tol", sq.inner_tol),
                ("lipschitz", sq.lipschitz),
                ("probe_ratio", sq.probe_ratio),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    err(format!("square.{name}"), "must be positive and finite");
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Solver coordinates `u ∈ [-1, 1]^d` (origin = box center) to parameter
    /// values, clamped to the box.
    pub fn to_params(&self, u: &[f64]) -> Vec<f64> {
        self.params
            .iter()
            .zip(u)
            .map(|(p, &ui)| {
                let mid = 0.5 * (p.lower + p.upper);
                let half = 0.5 * (p.upper - p.lower);
                (mid + half * ui).clamp(p.lower, p.upper)
            })
            .collect()
    }

    pub fn labeled(&self, values: &[f64]) -> Vec<LabeledValue> {
        self.params
            .iter()
            .zip(values)
            .map(|(p, &value)| LabeledValue {
                name: p.name.clone(),
                value,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledValue {
    pub name: String,
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn coffee() -> SessionSpec {
        SessionSpec {
            params: vec![
                ParamSpec {
                    name: "milk %".into(),
                    lower: 0.0,
                    upper: 30.0,
                },
                ParamSpec {
                    name: "strength %".into(),
                    lower: 20.0,
                    upper: 100.0,
                },
            ],
            solver: SessionSolver::OrderRcd,
            config: SolverConfig::default(),
            square: None,
            query_budget: 100,
        }
    }

    #[test]
    fn coffee_spec_is_valid_and_maps_center() {
        let s = coffee();
        s.validate().unwrap();
        assert_eq!(s.to_params(&[0.0, 0.0]), vec![15.0, 60.0]);
        assert_eq!(s.to_params(&[1.0, -1.0]), vec![30.0, 20.0]);
        assert_eq!(s.to_params(&[7.0, -3.0]), vec![30.0, 20.0]);
    }

    #[test]
    fn empty_params_rejected() {
        let mut s = coffee();
        s.params.clear();
        let errs = s.validate().unwrap_err();
        assert!(errs.iter().any(|e| e.field == "params"));
    }

    #[test]
    fn reports_every_bad_field() {
        let mut s = coffee();
        s.params[0].upper = -1.0;
        s.params[1].lower = f64::NAN;
        s.query_budget = 0;
        s.solver = SessionSolver::OrderAcdm;
        let fields: Vec<String> = s.validate().unwrap_err().into_iter().map(|e| e.field).collect();
        assert_eq!(
            fields,
            vec!["params[0].upper", "params[1].lower", "query_budget", "config.mu"]
        );
    }

    #[test]
    fn square_halving_needs_two_params() {
        let mut s = coffee();
        s.solver = SessionSolver::SquareHalving;
        s.validate().unwrap();
        s.params.pop();
        assert!(s.validate().is_err());
    }
}
