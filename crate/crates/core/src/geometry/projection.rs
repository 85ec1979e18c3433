//! Euclidean and Bregman (Mahalanobis) projections onto a convex body.

use nalgebra::{DMatrix, DVector};

use super::body::{ConvexBody, Halfspace, Shape};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist, dot, norm, SpdMatrix};

pub const DYKSTRA_TOL: f64 = 1e-10;
pub const DYKSTRA_MAX_SWEEPS: usize = 100_000;
pub const PROJECTED_GRADIENT_MAX_ITERS: usize = 100_000;
/// Stopping threshold on the relative iterate change of projected gradient.
pub const PROJECTED_GRADIENT_TOL: f64 = 1e-13;

impl ConvexBody {
    /// Nearest point of `K` in the Euclidean norm.
    pub fn euclidean_project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        match self.shape() {
            Shape::Ball { center, radius } => {
                let d = dist(x, center);
                if d <= *radius {
                    return Ok(x.to_vec());
                }
                let s = radius / d;
                Ok(x.iter().zip(center).map(|(v, c)| c + (v - c) * s).collect())
            }
            Shape::Box { lower, upper } => Ok(x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect()),
            Shape::Polytope { halfspaces } => project_polytope(halfspaces, x),
            Shape::Oracle { .. } => {
                if self.contains(x) {
                    return Ok(x.to_vec());
                }
                project_oracle(self, x)
            }
        }
    }

    /// `argmin_{y ∈ K} (x - y)ᵀ Q (x - y)`.
    pub fn bregman_project(&self, q: &SpdMatrix, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), q.dim())?;
        if q.is_identity() || self.contains(x) {
            return self.euclidean_project(x);
        }
        match self.shape() {
            Shape::Ball { center, radius } => Ok(bregman_project_ball(q, center, *radius, x)),
            Shape::Box { .. } | Shape::Polytope { .. } => {
                // with Q = L Lᵀ and z = Lᵀ y, the problem is a Euclidean
                // projection onto the polytope {z : (L⁻¹ a_i)ᵀ z <= b_i}
                let l = q.chol_lower();
                let lt = l.transpose();
                let hs: Vec<Halfspace> = self
                    .halfspaces()
                    .expect("facet shapes have halfspaces")
                    .into_iter()
                    .map(|h| {
                        let a = DVector::from_column_slice(&h.normal);
                        let t = l
                            .solve_lower_triangular(&a)
                            .expect("Cholesky factor is nonsingular");
                        Halfspace::new(t.as_slice().to_vec(), h.offset)
                    })
                    .collect();
                let z = &lt * DVector::from_column_slice(x);
                let pz = project_polytope(&hs, z.as_slice())?;
                let y = lt
                    .solve_upper_triangular(&DVector::from_column_slice(&pz))
                    .expect("Cholesky factor is nonsingular");
                Ok(y.as_slice().to_vec())
            }
            Shape::Oracle { .. } => bregman_projected_gradient(self, q, x),
        }
    }
}

fn project_halfspace(h: &Halfspace, y: &mut [f64]) {
    let viol = dot(&h.normal, y) - h.offset;
    if viol > 0.0 {
        let s = viol / dot(&h.normal, &h.normal);
        for (v, a) in y.iter_mut().zip(&h.normal) {
            *v -= s * a;
        }
    }
}

fn max_violation(halfspaces: &[Halfspace], y: &[f64]) -> f64 {
    halfspaces
        .iter()
        .map(|h| (dot(&h.normal, y) - h.offset) / norm(&h.normal))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Dykstra's alternating projections, followed by an exact solve on the
/// detected active set.
pub(crate) fn project_polytope(halfspaces: &[Halfspace], x: &[f64]) -> Result<Vec<f64>> {
    if max_violation(halfspaces, x) <= 0.0 {
        return Ok(x.to_vec());
    }
    let p = x.len();
    let mut y = x.to_vec();
    let mut increments = vec![vec![0.0; p]; halfspaces.len()];
    let mut converged = false;
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        let prev = y.clone();
        for (h, inc) in halfspaces.iter().zip(increments.iter_mut()) {
            let mut z: Vec<f64> = y.iter().zip(inc.iter()).map(|(a, b)| a + b).collect();
            let before = z.clone();
            project_halfspace(h, &mut z);
            for ((i, b), a) in inc.iter_mut().zip(&before).zip(&z) {
                *i = b - a;
            }
            y = z;
        }
        let scale = 1.0 + norm(&y);
        if dist(&prev, &y) <= DYKSTRA_TOL * scale && max_violation(halfspaces, &y) <= DYKSTRA_TOL * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "Dykstra projection",
            iterations: DYKSTRA_MAX_SWEEPS,
        });
    }
    Ok(polish_active_set(halfspaces, x, &y).unwrap_or(y))
}

/// Solves the equality-constrained projection on the facets that are tight
/// at `approx` and accepts it only if the KKT conditions hold.
fn polish_active_set(halfspaces: &[Halfspace], x: &[f64], approx: &[f64]) -> Option<Vec<f64>> {
    let p = x.len();
    let active: Vec<&Halfspace> = halfspaces
        .iter()
        .filter(|h| (dot(&h.normal, approx) - h.offset) / norm(&h.normal) > -1e-8)
        .collect();
    if active.is_empty() || active.len() > p {
        return None;
    }
    let k = active.len();
    let a = DMatrix::from_fn(k, p, |i, j| active[i].normal[j]);
    let gram = &a * a.transpose();
    let xv = DVector::from_column_slice(x);
    let rhs = &a * &xv - DVector::from_iterator(k, active.iter().map(|h| h.offset));
    let mu = gram.lu().solve(&rhs)?;
    if mu.iter().any(|m| *m < -1e-12) {
        return None;
    }
    let z = xv - a.transpose() * mu;
    let z = z.as_slice().to_vec();
    let scale = 1.0 + norm(&z);
    if max_violation(halfspaces, &z) > 1e-12 * scale || dist(&z, approx) > 1e-6 * scale {
        return None;
    }
    Some(z)
}

/// Projection onto `{y : ‖y - c‖ <= ρ}` in the `Q` metric. Stationarity gives
/// `y - c = (Q + μI)⁻¹ Q (x - c)`; `μ > 0` solves the secular equation
/// `‖y(μ) - c‖ = ρ`, which is monotone in `μ`.
fn bregman_project_ball(q: &SpdMatrix, center: &[f64], radius: f64, x: &[f64]) -> Vec<f64> {
    let eig = q.matrix().clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let w = v.transpose() * DVector::from_iterator(x.len(), x.iter().zip(center).map(|(a, c)| a - c));
    let lam = &eig.eigenvalues;
    let radius_at = |mu: f64| -> f64 {
        lam.iter()
            .zip(w.iter())
            .map(|(l, wi)| (l * wi / (l + mu)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut lo = 0.0;
    let mut hi = q.lambda_max();
    while radius_at(hi) > radius {
        hi *= 2.0;
    }
    // bisection to the resolution of f64
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if radius_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let coeff = DVector::from_iterator(
        x.len(),
        lam.iter().zip(w.iter()).map(|(l, wi)| l * wi / (l + mu)),
    );
    let y = v * coeff;
    let y: Vec<f64> = y.iter().zip(center).map(|(a, c)| a + c).collect();
    // land exactly on the sphere
    let d = dist(&y, center);
    y.iter().zip(center).map(|(a, c)| c + (a - c) * radius / d).collect()
}

/// Projected gradient on `(x - y)ᵀQ(x - y)` with step `1 / (2 λmax(Q))`.
fn bregman_projected_gradient(body: &ConvexBody, q: &SpdMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let step = 1.0 / (2.0 * q.lambda_max());
    let objective = |y: &[f64]| q.quad_form(&y.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>());
    let mut y = body.euclidean_project(x)?;
    let mut value = objective(&y);
    for _ in 0..PROJECTED_GRADIENT_MAX_ITERS {
        let resid: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let grad = q.apply(&resid);
        let trial: Vec<f64> = y.iter().zip(&grad).map(|(a, g)| a - 2.0 * step * g).collect();
        let next = body.euclidean_project(&trial)?;
        let next_value = objective(&next);
        let change = dist(&next, &y);
        // an inexact inner projection (oracle bodies) sets a noise floor:
        // stop once the objective no longer decreases
        if next_value >= value {
            return Ok(y);
        }
        y = next;
        value = next_value;
        if change <= PROJECTED_GRADIENT_TOL * (1.0 + norm(&y)) {
            return Ok(y);
        }
    }
    Err(Error::NonConvergence {
        what: "Bregman projected gradient",
        iterations: PROJECTED_GRADIENT_MAX_ITERS,
    })
}

const ORACLE_PROJECTION_MAX_ITERS: usize = 10_000;

/// Oracle bodies: boundary points are `u / g(u)`; minimise `‖x - u/g(u)‖²`
/// over directions `u` by gradient descent with finite differences and
/// backtracking.
fn project_oracle(body: &ConvexBody, x: &[f64]) -> Result<Vec<f64>> {
    let p = x.len();
    let boundary = |u: &[f64]| -> Vec<f64> {
        let g = body.raw_gauge(u).max(f64::MIN_POSITIVE);
        u.iter().map(|v| v / g).collect()
    };
    let objective = |u: &[f64]| -> f64 {
        let b = boundary(u);
        b.iter().zip(x).map(|(a, c)| (a - c) * (a - c)).sum()
    };
    // the gauge scaling of x is exterior, so start from that direction
    let scale = body.outer_radius().max(norm(x)) * 2.0;
    let mut u: Vec<f64> = x.iter().map(|v| v / norm(x) * scale).collect();
    let mut val = objective(&u);
    let fd = 1e-6 * scale;
    let mut lr = 0.25 * scale;
    for _ in 0..ORACLE_PROJECTION_MAX_ITERS {
        let mut grad = vec![0.0; p];
        let mut probe = u.clone();
        for j in 0..p {
            probe[j] = u[j] + fd;
            let up = objective(&probe);
            probe[j] = u[j] - fd;
            let down = objective(&probe);
            probe[j] = u[j];
            grad[j] = (up - down) / (2.0 * fd);
        }
        // only the tangential part moves the boundary point
        let radial = dot(&grad, &u) / dot(&u, &u);
        for (g, v) in grad.iter_mut().zip(&u) {
            *g -= radial * v;
        }
        let gnorm = norm(&grad);
        if gnorm * scale <= 1e-13 * (1.0 + val) {
            return Ok(boundary(&u));
        }
        let mut accepted = false;
        while lr > 1e-18 * scale {
            let trial: Vec<f64> = u.iter().zip(&grad).map(|(a, g)| a - lr * g / gnorm).collect();
            let tn = norm(&trial);
            let trial: Vec<f64> = trial.iter().map(|v| v / tn * scale).collect();
            let tv = objective(&trial);
            if tv < val {
                u = trial;
                val = tv;
                lr *= 2.0;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            return Ok(boundary(&u));
        }
    }
    Err(Error::NonConvergence {
        what: "oracle-body projection",
        iterations: ORACLE_PROJECTION_MAX_ITERS,
    })
}
