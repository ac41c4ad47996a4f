//! White-box test problems. Everything here may look at `f`, `∇f` and `x*`;
//! solvers only ever receive these through an oracle.

mod baselines;
mod description;
mod quadratic;
mod stochastic;

pub use baselines::{acdm_baseline, gd_baseline, rcd_baseline};
pub use description::{ProblemDescription, SpectrumSpec};
pub use quadratic::{make_quadratic, ProblemError, QuadraticProblem};
pub use stochastic::{RealizationModel, StochasticQuadratic};
