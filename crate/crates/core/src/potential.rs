//! Target potentials `f` and the penalized surrogate `U^λ = f + d_K / (2λ²)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexBody, Penalty};
use crate::linalg::{norm, SpdMatrix};

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

const MINIMIZER_GRAD_TOL: f64 = 1e-8;
const MINIMIZER_MAX_ITERS: usize = 1_000_000;

#[derive(Clone)]
pub enum PotentialForm {
    /// `f(x) = ½ (x - μ)ᵀ A (x - μ)`.
    Quadratic { center: Vec<f64>, precision: SpdMatrix },
    Custom { value: ValueFn, gradient: GradientFn },
}

impl fmt::Debug for PotentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialForm::Quadratic { center, precision } => f
                .debug_struct("Quadratic")
                .field("center", center)
                .field("precision", precision)
                .finish(),
            PotentialForm::Custom { .. } => f.write_str("Custom"),
        }
    }
}

/// An `m`-strongly convex, `M`-smooth potential together with its minimizer.
#[derive(Debug, Clone)]
pub struct Potential {
    form: PotentialForm,
    strong_convexity: f64,
    smoothness: f64,
    minimizer: Vec<f64>,
}

impl Potential {
    pub fn quadratic(center: Vec<f64>, precision: SpdMatrix) -> Result<Self> {
        check_dim(precision.dim(), center.len())?;
        Ok(Self {
            strong_convexity: precision.lambda_min(),
            smoothness: precision.lambda_max(),
            minimizer: center.clone(),
            form: PotentialForm::Quadratic { center, precision },
        })
    }

    /// `‖x‖² / 2` in `dim` dimensions.
    pub fn standard_gaussian(dim: usize) -> Self {
        Self::quadratic(vec![0.0; dim], SpdMatrix::identity(dim)).expect("identity is SPD")
    }

    /// User-supplied potential. The minimizer is located by gradient descent
    /// with step `1/M` from `start`, stopping at `‖∇f‖ <= 1e-8`.
    pub fn custom(value: ValueFn, gradient: GradientFn, m: f64, big_m: f64, start: Vec<f64>) -> Result<Self> {
        if !(m > 0.0 && m <= big_m && big_m.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < m <= M, got m={m}, M={big_m}"
            )));
        }
        let mut x = start;
        let mut converged = false;
        for _ in 0..MINIMIZER_MAX_ITERS {
            let g = gradient(&x);
            check_dim(x.len(), g.len())?;
            if norm(&g) <= MINIMIZER_GRAD_TOL {
                converged = true;
                break;
            }
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi -= gi / big_m;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "potential minimizer search",
                iterations: MINIMIZER_MAX_ITERS,
            });
        }
        Ok(Self {
            form: PotentialForm::Custom { value, gradient },
            strong_convexity: m,
            smoothness: big_m,
            minimizer: x,
        })
    }

    pub fn form(&self) -> &PotentialForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.minimizer.len()
    }

    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.form {
            PotentialForm::Quadratic { center, precision } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                0.5 * precision.quad_form(&d)
            }
            PotentialForm::Custom { value, .. } => value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.form {
            PotentialForm::Quadratic { center, precision } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                precision.apply(&d)
            }
            PotentialForm::Custom { gradient, .. } => gradient(x),
        }
    }
}

/// `U^λ(x) = f(x) + d_K(x) / (2λ²)`.
#[derive(Debug, Clone)]
pub struct SurrogatePotential {
    pub potential: Potential,
    pub penalty: Penalty,
    pub body: ConvexBody,
}

impl SurrogatePotential {
    pub fn new(potential: Potential, penalty: Penalty, body: ConvexBody) -> Result<Self> {
        check_dim(body.dim(), potential.dim())?;
        Ok(Self {
            potential,
            penalty,
            body,
        })
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn lambda(&self) -> f64 {
        self.penalty.lambda
    }

    fn penalty_weight(&self) -> f64 {
        1.0 / (2.0 * self.penalty.lambda * self.penalty.lambda)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let d = self.penalty.distance(&self.body, x)?;
        Ok(self.potential.value(x) + d * self.penalty_weight())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut g = self.potential.gradient(x);
        let w = self.penalty_weight();
        let pg = self.penalty.gradient(&self.body, x)?;
        for (gi, pi) in g.iter_mut().zip(pg) {
            *gi += w * pi;
        }
        Ok(g)
    }

    /// Gradient-Lipschitz bound `M^λ = M + M0 / (2λ²)`, where `M0` bounds the
    /// Lipschitz constant of `∇d_K` (so `M + 1/λ²` for the Euclidean envelope
    /// and `M + λmax(Q)/λ²` for Bregman).
    pub fn smoothness_bound(&self) -> f64 {
        self.potential.smoothness() + self.penalty.m0 * self.penalty_weight()
    }

    pub fn strong_convexity(&self) -> f64 {
        self.potential.strong_convexity()
    }
}
