use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::oracle::{Direction, NoiseModel, Objective, OrderOracle};
use crate::sampling::{CoordinateSmoothness, SmoothnessError};
use crate::{Rng, Vector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension must be at least 1")]
    Empty,
    #[error("b has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix has a negative eigenvalue {0:e}")]
    NotPositiveSemidefinite(f64),
    #[error("negative diagonal entry A[{index}][{index}] = {value}")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("non-finite entry in problem data")]
    NonFinite,
    #[error("b is not in the range of A: the objective is unbounded below")]
    Unbounded,
    #[error("spectrum must be non-empty, finite and positive")]
    BadSpectrum,
}

/// `f(x) = ½⟨x, Ax⟩ - ⟨b, x⟩ + c` with cached minimizer and constants.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
    x_star: DVector<f64>,
    f_star: f64,
    eigenvalues: DVector<f64>,
    lipschitz: Vec<f64>,
}

/// Relative threshold below which an eigenvalue counts as zero.
const ZERO_EIG: f64 = 1e-12;

impl QuadraticProblem {
    /// Validates and caches `x*`, `f*` and the spectrum. `A` must be
    /// symmetric positive semidefinite; for singular `A`, `b` must lie in
    /// its range (then `x*` is the minimum-norm minimizer).
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self, ProblemError> {
        let (rows, cols) = a.shape();
        if rows != cols {
            return Err(ProblemError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(ProblemError::Empty);
        }
        if b.len() != rows {
            return Err(ProblemError::DimensionMismatch {
                expected: rows,
                got: b.len(),
            });
        }
        if !(a.iter().all(|v| v.is_finite()) && b.iter().all(|v| v.is_finite()) && c.is_finite()) {
            return Err(ProblemError::NonFinite);
        }
        let scale = a.amax().max(1.0);
        let asym = (&a - a.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(ProblemError::NotSymmetric(asym));
        }
        if let Some(index) = (0..rows).find(|&i| a[(i, i)] < 0.0) {
            return Err(ProblemError::NegativeDiagonal {
                index,
                value: a[(index, index)],
            });
        }
        // symmetrize exactly so that the eigen-solver sees a symmetric matrix
        let a = (&a + a.transpose()) * 0.5;
        let eig = a.clone().symmetric_eigen();
        let lambda_max = eig.eigenvalues.amax();
        let zero = ZERO_EIG * lambda_max.max(f64::MIN_POSITIVE);
        let lambda_min = eig.eigenvalues.min();
        if lambda_min < -zero {
            return Err(ProblemError::NotPositiveSemidefinite(lambda_min));
        }
        let mut x_star = DVector::zeros(rows);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > zero {
                let v = eig.eigenvectors.column(k);
                x_star += v * (v.dot(&b) / lam);
            }
        }
        let residual = (&a * &x_star - &b).norm();
        if residual > 1e-9 * b.norm().max(1.0) {
            return Err(ProblemError::Unbounded);
        }
        let f_star = -0.5 * b.dot(&x_star) + c;
        let lipschitz = (0..rows).map(|i| a[(i, i)]).collect();
        Ok(Self {
            a,
            b,
            c,
            x_star,
            f_star,
            eigenvalues: eig.eigenvalues,
            lipschitz,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn x_star(&self) -> &DVector<f64> {
        &self.x_star
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        0.5 * x.dot(&(&self.a * &x)) - self.b.dot(&x) + self.c
    }

    pub fn gradient(&self, x: &[f64]) -> Vector {
        &self.a * DVector::from_column_slice(x) - &self.b
    }

    /// `∇_i f(x)` in O(d).
    pub fn partial(&self, x: &[f64], i: usize) -> f64 {
        self.a.row(i).iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>() - self.b[i]
    }

    /// `L_i = A_ii`.
    pub fn lipschitz(&self) -> &[f64] {
        &self.lipschitz
    }

    pub fn smoothness(&self, alpha: f64) -> Result<CoordinateSmoothness, SmoothnessError> {
        CoordinateSmoothness::new(self.lipschitz.clone(), alpha)
    }

    /// Ascending eigenvalues of `A`.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Euclidean strong-convexity modulus `λ_min(A)` (0 when singular).
    pub fn mu(&self) -> f64 {
        self.eigenvalues.min().max(0.0)
    }

    /// Full-gradient Lipschitz constant `λ_max(A)`.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.max()
    }

    /// Strong-convexity modulus in the norm `‖x‖²_{[1-α]} = Σ L_i^{1-α} x_i²`:
    /// the smallest eigenvalue of `D^{-1/2} A D^{-1/2}`, `D = diag(L_i^{1-α})`.
    /// Requires a strictly positive diagonal.
    pub fn mu_alpha(&self, alpha: f64) -> Option<f64> {
        if self.lipschitz.iter().any(|&l| l <= 0.0) || !(0.0..=1.0).contains(&alpha) {
            return None;
        }
        let d = self.dim();
        let scale: Vec<f64> = self.lipschitz.iter().map(|l| l.powf((1.0 - alpha) / 2.0)).collect();
        let m = DMatrix::from_fn(d, d, |i, j| self.a[(i, j)] / (scale[i] * scale[j]));
        Some(m.symmetric_eigen().eigenvalues.min().max(0.0))
    }

    /// Largest `μ` with `‖∇f(x)‖² >= 2μ(f(x) - f*)` everywhere: the
    /// smallest positive eigenvalue of `A`.
    pub fn pl_modulus(&self) -> f64 {
        let zero = ZERO_EIG * self.lambda_max().max(f64::MIN_POSITIVE);
        self.eigenvalues
            .iter()
            .copied()
            .filter(|&l| l > zero)
            .fold(f64::INFINITY, f64::min)
    }

    /// `f(x) - f*`, computed as `½ (x - x*)ᵀ A (x - x*)` to avoid
    /// cancellation.
    pub fn suboptimality(&self, x: &[f64]) -> f64 {
        let e = DVector::from_column_slice(x) - &self.x_star;
        0.5 * e.dot(&(&self.a * &e))
    }

    pub fn gradient_norm(&self, x: &[f64]) -> f64 {
        self.gradient(x).norm()
    }

    /// `‖∇f(x)‖*_{[α]} = sqrt(Σ ∇_i f(x)² / L_i^α)`.
    pub fn weighted_dual_norm(&self, x: &[f64], alpha: f64) -> f64 {
        self.gradient(x)
            .iter()
            .zip(&self.lipschitz)
            .map(|(g, l)| g * g / if alpha == 0.0 { 1.0 } else { l.powf(alpha) })
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance_to_optimum(&self, x: &[f64]) -> f64 {
        (DVector::from_column_slice(x) - &self.x_star).norm()
    }

    pub fn as_order_oracle(&self, noise: NoiseModel) -> OrderOracle<&Self> {
        OrderOracle::new(self, noise)
    }
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    /// `f(p + s·v) - f(p + t·v) = (s - t)(⟨∇f(p), v⟩ + ½(s + t)⟨v, Av⟩)`,
    /// which stays accurate when the two values nearly cancel.
    fn difference_on_line(&self, base: &[f64], dir: Direction<'_>, s: f64, t: f64) -> f64 {
        match dir {
            Direction::Coordinate(i) => (s - t) * (self.partial(base, i) + 0.5 * self.a[(i, i)] * (s + t)),
            Direction::Dense(v) => {
                let v = DVector::from_column_slice(v);
                let g = self.gradient(base);
                (s - t) * (g.dot(&v) + 0.5 * (s + t) * v.dot(&(&self.a * &v)))
            }
        }
    }
}

/// `A = Q Λ Qᵀ` with `Q` Haar-random orthogonal from `rotation_seed`
/// (`None` keeps `Q = I`), `b ~ N(0, I)` drawn from `rng`, `c = 0`.
pub fn make_quadratic(
    d: usize,
    spectrum: &[f64],
    rotation_seed: Option<u64>,
    rng: &mut Rng,
) -> Result<QuadraticProblem, ProblemError> {
    if d == 0 || spectrum.len() != d || spectrum.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(ProblemError::BadSpectrum);
    }
    let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
    let a = match rotation_seed {
        Some(seed) => {
            let q = random_orthogonal(d, &mut Rng::new(seed));
            &q * lambda * q.transpose()
        }
        None => lambda,
    };
    let b = DVector::from_fn(d, |_, _| rng.standard_normal());
    QuadraticProblem::new(a, b, 0.0)
}

/// QR of a Gaussian matrix with the signs of `R`'s diagonal folded into `Q`.
fn random_orthogonal(d: usize, rng: &mut Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.standard_normal());
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}
