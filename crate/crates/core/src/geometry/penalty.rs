//! Distance penalties `d_K` and their gradients.
//!
//! | kind      | `d_K(x)`                      | `∇d_K(x)`                | `M0` (Lipschitz const. of `∇d_K`) |
//! |-----------|-------------------------------|--------------------------|-----------------------------------|
//! | Euclidean | `‖x - P(x)‖²`                 | `2 (x - P(x))`           | `2`                               |
//! | Bregman   | `(x - P_Q(x))ᵀ Q (x - P_Q(x))`| `2 Q (x - P_Q(x))`       | `2 λmax(Q)`                       |
//! | Gauge     | `(g_K(x) - 1)²`               | `2 (g_K(x) - 1) ∇g_K(x)` | `2 (1 + C_K r) / r²`              |
//!
//! The surrogate adds `d_K / (2λ²)`, so its smoothness is `M + M0 / (2λ²)`.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::body::{ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::linalg::{norm, SpdMatrix};

/// Boundary directions sampled when estimating the gauge curvature `C_K`.
pub const CURVATURE_SAMPLES: usize = 1000;
const CURVATURE_SEED: u64 = 0x6761_7567_6543_4b00;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PenaltyKind {
    Euclidean,
    Bregman { q: SpdMatrix },
    Gauge,
}

impl fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyKind::Euclidean => "euclidean",
            PenaltyKind::Bregman { .. } => "bregman",
            PenaltyKind::Gauge => "gauge",
        })
    }
}

/// A penalty `d_K` bound to a tuning parameter `λ`, with its smoothness
/// constant `M0` and quadratic-equivalence constants `c1 <= c2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Penalty {
    pub kind: PenaltyKind,
    pub lambda: f64,
    pub m0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Penalty {
    pub fn new(kind: PenaltyKind, lambda: f64, body: &ConvexBody) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        let (m0, c1, c2) = match &kind {
            PenaltyKind::Euclidean => (2.0, 1.0, 1.0),
            PenaltyKind::Bregman { q } => {
                if q.dim() != body.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: body.dim(),
                        got: q.dim(),
                    });
                }
                (2.0 * q.lambda_max(), q.lambda_min(), q.lambda_max())
            }
            PenaltyKind::Gauge => {
                let r = body.inner_radius();
                let big_r = body.outer_radius();
                let ck = gauge_curvature(body);
                (2.0 * (1.0 + ck * r) / (r * r), 1.0 / (big_r * big_r), 1.0 / (r * r))
            }
        };
        Ok(Self {
            kind,
            lambda,
            m0,
            c1,
            c2,
        })
    }

    pub fn euclidean(lambda: f64, body: &ConvexBody) -> Result<Self> {
        Self::new(PenaltyKind::Euclidean, lambda, body)
    }

    pub fn gauge(lambda: f64, body: &ConvexBody) -> Result<Self> {
        Self::new(PenaltyKind::Gauge, lambda, body)
    }

    pub fn bregman(q: SpdMatrix, lambda: f64, body: &ConvexBody) -> Result<Self> {
        Self::new(PenaltyKind::Bregman { q }, lambda, body)
    }

    /// Same penalty with a different `λ` (constants do not depend on it).
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self {
            lambda,
            ..self.clone()
        })
    }

    /// `d_K(x)`; zero on `K`.
    pub fn distance(&self, body: &ConvexBody, x: &[f64]) -> Result<f64> {
        match &self.kind {
            PenaltyKind::Euclidean => {
                let p = body.euclidean_project(x)?;
                Ok(x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum())
            }
            PenaltyKind::Bregman { q } => {
                let p = body.bregman_project(q, x)?;
                let resid: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
                Ok(q.quad_form(&resid))
            }
            PenaltyKind::Gauge => {
                let g = body.gauge(x)?;
                Ok((g - 1.0) * (g - 1.0))
            }
        }
    }

    /// `∇d_K(x)`; zero on the interior of `K`.
    pub fn gradient(&self, body: &ConvexBody, x: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            PenaltyKind::Euclidean => {
                let p = body.euclidean_project(x)?;
                Ok(x.iter().zip(&p).map(|(a, b)| 2.0 * (a - b)).collect())
            }
            PenaltyKind::Bregman { q } => {
                let p = body.bregman_project(q, x)?;
                let resid: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
                Ok(q.apply(&resid).into_iter().map(|v| 2.0 * v).collect())
            }
            PenaltyKind::Gauge => {
                let g = body.gauge(x)?;
                if g <= 1.0 {
                    return Ok(vec![0.0; x.len()]);
                }
                let grad = body.gauge_gradient(x)?;
                Ok(grad.into_iter().map(|v| 2.0 * (g - 1.0) * v).collect())
            }
        }
    }
}

/// `C_K = sup_{‖u‖=1} ‖∇²γ_K(u)‖`.
///
/// Centered balls have `C_K = 1/ρ` exactly. Otherwise the Hessian is
/// estimated by central differences of the gauge gradient at
/// [`CURVATURE_SAMPLES`] random directions, pushed outside `K` and rescaled
/// by 1-homogeneity. Stencils that straddle a facet change of a polytope
/// are skipped, so piecewise-linear gauges give 0.
pub fn gauge_curvature(body: &ConvexBody) -> f64 {
    if let Shape::Ball { center, radius } = body.shape() {
        if center.iter().all(|c| *c == 0.0) {
            return 1.0 / radius;
        }
    }
    let p = body.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(CURVATURE_SEED);
    let s = 2.0 * body.outer_radius();
    let step = 1e-4 * s;
    let has_facets = body.halfspaces().is_some();
    let mut worst: f64 = 0.0;
    for _ in 0..CURVATURE_SAMPLES {
        let u: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let un = norm(&u);
        let x: Vec<f64> = u.iter().map(|v| v / un * s).collect();
        let facet = if has_facets { body.active_facet(&x).map(|f| f.0) } else { None };
        let mut hess = DMatrix::zeros(p, p);
        let mut skip = false;
        let mut probe = x.clone();
        for j in 0..p {
            probe[j] = x[j] + step;
            let up = body.gauge_gradient(&probe);
            let up_facet = if has_facets { body.active_facet(&probe).map(|f| f.0) } else { None };
            probe[j] = x[j] - step;
            let down = body.gauge_gradient(&probe);
            let down_facet = if has_facets { body.active_facet(&probe).map(|f| f.0) } else { None };
            probe[j] = x[j];
            if up_facet != facet || down_facet != facet {
                skip = true;
                break;
            }
            let (Ok(up), Ok(down)) = (up, down) else {
                skip = true;
                break;
            };
            for i in 0..p {
                hess[(i, j)] = (up[i] - down[i]) / (2.0 * step);
            }
        }
        if skip {
            continue;
        }
        let sym = (&hess + hess.transpose()) * 0.5;
        let spectral = sym
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        // H(u) = s · H(s u) for the 1-homogeneous gauge
        worst = worst.max(spectral * s);
    }
    worst
}

/// Euclidean residual `‖x - P_K(x)‖`, used for the quadratic-equivalence checks.
pub fn euclidean_residual(body: &ConvexBody, x: &[f64]) -> Result<f64> {
    let p = body.euclidean_project(x)?;
    Ok(norm(&x.iter().zip(&p).map(|(a, b)| a - b).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
        let gauge = Penalty::gauge(0.1, &ball).unwrap();
        let euc = Penalty::euclidean(0.1, &ball).unwrap();
        assert_eq!(gauge.distance(&ball, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(euc.distance(&ball, &[1.0, 0.0]).unwrap(), 0.25);
        let q = Penalty::bregman(SpdMatrix::diagonal(&[4.0, 1.0]).unwrap(), 0.1, &ball).unwrap();
        for pen in [&gauge, &euc, &q] {
            assert_eq!(pen.distance(&ball, &[0.1, 0.0]).unwrap(), 0.0);
            assert_eq!(pen.gradient(&ball, &[0.1, 0.0]).unwrap(), vec![0.0, 0.0]);
        }
    }

    #[test]
    fn gradient_examples() {
        let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
        let euc = Penalty::euclidean(0.1, &ball).unwrap();
        assert_eq!(euc.gradient(&ball, &[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let gauge = Penalty::gauge(0.1, &ball).unwrap();
        let g = gauge.gradient(&ball, &[1.0, 0.0]).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-14 && g[1] == 0.0);
    }

    #[test]
    fn smoothness_constants_per_kind() {
        let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
        assert_eq!(Penalty::euclidean(1.0, &ball).unwrap().m0, 2.0);
        let gauge = Penalty::gauge(1.0, &ball).unwrap();
        assert!((gauge.m0 - 4.0 / 0.25).abs() < 1e-12);
        assert!((gauge.c1 - 4.0).abs() < 1e-12 && (gauge.c2 - 4.0).abs() < 1e-12);
        let b = Penalty::bregman(SpdMatrix::diagonal(&[4.0, 1.0]).unwrap(), 1.0, &ball).unwrap();
        assert_eq!((b.m0, b.c1, b.c2), (8.0, 1.0, 4.0));
        // polytope gauges are piecewise linear: no curvature term
        let simplex = ConvexBody::shifted_simplex();
        assert_eq!(gauge_curvature(&simplex), 0.0);
        let sg = Penalty::gauge(1.0, &simplex).unwrap();
        assert!((sg.m0 - 2.0 / 0.09).abs() < 1e-9);
    }

    #[test]
    fn off_center_ball_curvature_is_bounded() {
        let b = ConvexBody::ball(vec![0.1, 0.0], 0.5).unwrap();
        let ck = gauge_curvature(&b);
        assert!(ck > 0.0 && ck.is_finite());
    }

    #[test]
    fn rejects_bad_lambda() {
        let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
        assert!(Penalty::euclidean(0.0, &ball).is_err());
        assert!(Penalty::euclidean(f64::NAN, &ball).is_err());
    }
}
