//! Desk-scale checks of how fast `W_q(ν, ν^λ)` shrinks with `λ`, on the
//! rotation-invariant family "standard Gaussian restricted to a centered ball".

use serde::Serialize;

use crate::geometry::{ConvexBody, Penalty};
use crate::metrics::{loglog_slope, radial_wasserstein, surrogate_radial_density, GRID_POINTS};
use crate::potential::Potential;
use crate::Result;

/// `λ = 2^{-3}, …, 2^{-8}`.
pub fn default_lambdas() -> Vec<f64> {
    (3..=8).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RateStudy {
    pub dim: usize,
    pub q: f64,
    pub radius: f64,
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
}

impl RateStudy {
    /// `W / λ` along the grid.
    pub fn ratios(&self) -> Vec<f64> {
        self.pairs.iter().map(|(l, w)| w / l).collect()
    }
}

/// `W_q` between the constrained Gaussian and its Euclidean-penalty
/// surrogate for each `λ`, plus the fitted log-log slope.
pub fn gaussian_ball_study(dim: usize, q: f64, radius: f64, lambdas: &[f64]) -> Result<RateStudy> {
    let body = ConvexBody::centered_ball(dim, radius)?;
    let f = Potential::standard_gaussian(dim);
    let target = surrogate_radial_density(&f, &body, None, GRID_POINTS)?;
    let mut pairs = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let pen = Penalty::euclidean(lambda, &body)?;
        let approx = surrogate_radial_density(&f, &body, Some(&pen), GRID_POINTS)?;
        pairs.push((lambda, radial_wasserstein(q, &target, &approx)?));
    }
    let slope = loglog_slope(&pairs)?;
    Ok(RateStudy {
        dim,
        q,
        radius,
        pairs,
        slope,
    })
}
