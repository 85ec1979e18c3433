//! Clamped gauge `g_K(x) = inf{t >= 1 : x ∈ tK}` and its gradient.

use super::body::{ConvexBody, Shape};
use crate::error::{check_dim, Result};
use crate::linalg::{dot, norm};

/// Relative width at which the oracle bisection stops.
pub const BISECTION_RTOL: f64 = 1e-12;
/// Central-difference step for oracle-body gauge gradients.
pub const ORACLE_GRADIENT_STEP: f64 = 1e-6;

impl ConvexBody {
    /// Clamped gauge value; equals 1 on `K`.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.raw_gauge(x).max(1.0))
    }

    /// Gradient of the clamped gauge; zero wherever the clamp is active.
    pub fn gauge_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let p = self.dim();
        if self.raw_gauge(x) <= 1.0 {
            return Ok(vec![0.0; p]);
        }
        Ok(match self.shape() {
            Shape::Ball { center, radius } => {
                let t = ball_gauge(center, *radius, x);
                let resid: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - t * c).collect();
                let denom = dot(center, &resid) + t * radius * radius;
                resid.iter().map(|v| v / denom).collect()
            }
            Shape::Box { .. } | Shape::Polytope { .. } => {
                let (i, _) = self.active_facet(x).expect("facet shapes have halfspaces");
                let h = &self.halfspaces().expect("facet shapes have halfspaces")[i];
                h.normal.iter().map(|a| a / h.offset).collect()
            }
            Shape::Oracle { .. } => {
                let mut grad = vec![0.0; p];
                let mut probe = x.to_vec();
                for j in 0..p {
                    let step = ORACLE_GRADIENT_STEP * x[j].abs().max(1.0);
                    probe[j] = x[j] + step;
                    let up = self.raw_gauge(&probe).max(1.0);
                    probe[j] = x[j] - step;
                    let down = self.raw_gauge(&probe).max(1.0);
                    probe[j] = x[j];
                    grad[j] = (up - down) / (2.0 * step);
                }
                grad
            }
        })
    }

    /// Facet attaining `max_i a_iᵀx / b_i`; the lowest index wins ties.
    pub fn active_facet(&self, x: &[f64]) -> Option<(usize, f64)> {
        let hs = self.halfspaces()?;
        let mut best: Option<(usize, f64)> = None;
        for (i, h) in hs.iter().enumerate() {
            let s = dot(&h.normal, x) / h.offset;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        best
    }

    /// Unclamped Minkowski functional `inf{t >= 0 : x ∈ tK}`; for oracle
    /// bodies only resolved above 1 (values inside `K` are reported as 1).
    pub(crate) fn raw_gauge(&self, x: &[f64]) -> f64 {
        match self.shape() {
            Shape::Ball { center, radius } => ball_gauge(center, *radius, x),
            Shape::Box { .. } | Shape::Polytope { .. } => {
                self.active_facet(x).map(|(_, s)| s).unwrap_or(0.0).max(0.0)
            }
            Shape::Oracle { membership } => {
                if membership(x) {
                    return 1.0;
                }
                // g_K <= 1 + |x|/r because the r-ball sits inside K
                let mut lo = 1.0;
                let mut hi = 1.0 + norm(x) / self.inner_radius();
                let mut scaled = vec![0.0; x.len()];
                while hi - lo > BISECTION_RTOL * hi {
                    let mid = 0.5 * (lo + hi);
                    for (s, v) in scaled.iter_mut().zip(x) {
                        *s = v / mid;
                    }
                    if membership(&scaled) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }
}

/// Smallest `t >= 0` with `‖x - t c‖ = t ρ`.
fn ball_gauge(center: &[f64], radius: f64, x: &[f64]) -> f64 {
    let c2 = dot(center, center);
    let xc = dot(x, center);
    let x2 = dot(x, x);
    let a = radius * radius - c2;
    if c2 == 0.0 {
        return x2.sqrt() / radius;
    }
    // positive root of a t² + 2 (x·c) t - |x|² = 0, in cancellation-free form
    let disc = (xc * xc + a * x2).sqrt();
    if xc >= 0.0 {
        x2 / (disc + xc).max(f64::MIN_POSITIVE)
    } else {
        (disc - xc) / a
    }
}
