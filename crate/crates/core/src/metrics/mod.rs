//! Wasserstein estimators, exact ground-truth sampling and rate fitting.

mod assignment;
pub mod radial;

pub use radial::{radial_wasserstein, surrogate_radial_density, RadialDensity, GRID_POINTS, QUANTILE_POINTS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::linalg::dist;
use crate::potential::{Potential, PotentialForm};

/// Largest sample size accepted by the exact assignment solver.
pub const MAX_ASSIGNMENT_SIZE: usize = 2000;
/// Acceptance rates below this trigger a warning.
pub const LOW_ACCEPTANCE: f64 = 1e-4;
const MAX_PROPOSALS: u64 = 1 << 36;

/// `N` equally weighted points in `R^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::DegenerateInput("empirical measure needs at least one point".into()))?;
        if dim == 0 {
            return Err(Error::DegenerateInput("points must have positive dimension".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::DegenerateInput("non-finite coordinate".into()));
            }
        }
        Ok(Self { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in &self.points {
            m.iter_mut().zip(p).for_each(|(a, b)| *a += b);
        }
        m.iter_mut().for_each(|a| *a /= self.points.len() as f64);
        m
    }
}

fn check_pair(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(format!("{} vs {} points", a.len(), b.len())));
    }
    Ok(())
}

fn check_order(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("order q must be >= 1, got {q}")))
    }
}

/// Exact `W_q` between two uniform empirical measures of equal size.
pub fn wasserstein_empirical(q: f64, a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64> {
    check_order(q)?;
    check_pair(a, b)?;
    let n = a.len();
    if n > MAX_ASSIGNMENT_SIZE {
        return Err(Error::SizeMismatch(format!(
            "{n} points exceeds the exact solver limit of {MAX_ASSIGNMENT_SIZE}; use sliced_wasserstein"
        )));
    }
    let mut cost = Vec::with_capacity(n * n);
    for x in &a.points {
        for y in &b.points {
            cost.push(dist(x, y).powf(q));
        }
    }
    let assign = assignment::solve(n, &cost);
    let total: f64 = assign.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    Ok((total / n as f64).max(0.0).powf(1.0 / q))
}

fn sorted_cost(q: f64, mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    xs.iter().zip(&ys).map(|(x, y)| (x - y).abs().powf(q)).sum::<f64>() / xs.len() as f64
}

/// Monte Carlo sliced `W_q`: the mean over random unit directions of the
/// one-dimensional `W_q^q`, then the `q`-th root. Direction `j` is drawn from
/// its own substream of `seed`, so the value does not depend on thread count.
pub fn sliced_wasserstein(
    q: f64,
    a: &EmpiricalMeasure,
    b: &EmpiricalMeasure,
    n_projections: usize,
    seed: u64,
) -> Result<f64> {
    check_order(q)?;
    check_pair(a, b)?;
    if a.dim == 1 {
        let xs = a.points.iter().map(|p| p[0]).collect();
        let ys = b.points.iter().map(|p| p[0]).collect();
        return Ok(sorted_cost(q, xs, ys).powf(1.0 / q));
    }
    if n_projections == 0 {
        return Err(Error::InvalidArgument("need at least one projection".into()));
    }
    let dim = a.dim;
    let costs: Vec<f64> = (0..n_projections)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let mut dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            dir.iter_mut().for_each(|x| *x /= len);
            let project = |m: &EmpiricalMeasure| -> Vec<f64> {
                m.points.iter().map(|p| p.iter().zip(&dir).map(|(x, d)| x * d).sum()).collect()
            };
            sorted_cost(q, project(a), project(b))
        })
        .collect();
    Ok((costs.iter().sum::<f64>() / n_projections as f64).powf(1.0 / q))
}

#[derive(Debug, Clone)]
pub struct RejectionSample {
    pub measure: EmpiricalMeasure,
    pub proposals: u64,
}

impl RejectionSample {
    pub fn acceptance_rate(&self) -> f64 {
        self.measure.len() as f64 / self.proposals as f64
    }
}

/// Exact draws from `∝ e^{-f} 1_K` for quadratic `f`, proposing from the
/// Gaussian `N(μ, A^{-1})` and keeping the points inside `K`.
pub fn rejection_sample_target<R: Rng + ?Sized>(
    f: &Potential,
    body: &ConvexBody,
    n: usize,
    rng: &mut R,
) -> Result<RejectionSample> {
    let (center, precision) = match f.form() {
        PotentialForm::Quadratic { center, precision } => (center, precision),
        PotentialForm::Custom { .. } => {
            return Err(Error::InvalidArgument("rejection sampling needs a quadratic potential".into()))
        }
    };
    if body.dim() != center.len() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: center.len(),
        });
    }
    if n == 0 {
        return Err(Error::DegenerateInput("requested zero samples".into()));
    }
    let dim = center.len();
    let l = precision.chol_lower();
    let mut points = Vec::with_capacity(n);
    let mut proposals = 0u64;
    let mut x = vec![0.0; dim];
    while points.len() < n {
        if proposals >= MAX_PROPOSALS {
            return Err(Error::DegenerateInput(format!(
                "only {} of {n} samples accepted after {proposals} proposals",
                points.len()
            )));
        }
        proposals += 1;
        let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        // solve Lᵀ y = z by back substitution; y ~ N(0, A^{-1})
        for i in (0..dim).rev() {
            let mut s = z[i];
            for k in i + 1..dim {
                s -= l[(k, i)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        let y: Vec<f64> = x.iter().zip(center).map(|(a, c)| a + c).collect();
        if body.contains(&y) {
            points.push(y);
        }
    }
    let rate = n as f64 / proposals as f64;
    if rate < LOW_ACCEPTANCE {
        log::warn!("low rejection-sampling acceptance rate {rate:e}");
    }
    Ok(RejectionSample {
        measure: EmpiricalMeasure::new(points)?,
        proposals,
    })
}

/// Least-squares slope of `ln W` against `ln λ`.
pub fn loglog_slope(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 pairs, got {}", pairs.len())));
    }
    if pairs.iter().any(|&(l, w)| !(l > 0.0 && w > 0.0 && l.is_finite() && w.is_finite())) {
        return Err(Error::DegenerateInput("all values must be positive and finite".into()));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all λ values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
