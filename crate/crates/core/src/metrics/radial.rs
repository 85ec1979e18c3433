use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Penalty, Shape};
use crate::potential::{Potential, PotentialForm};

/// Quantile points used when integrating `|F_A^{-1} - F_B^{-1}|^q`.
pub const QUANTILE_POINTS: usize = 200_000;
/// Default number of grid nodes for tabulated radial densities.
pub const GRID_POINTS: usize = 200_001;
/// Tail widths (in units of the decay scale) beyond which mass is neglected.
const PENALTY_TAIL_WIDTHS: f64 = 12.0;
const GAUSSIAN_TAIL_OFFSET: f64 = 9.0;

/// Unnormalized density of `‖X‖`, tabulated on a uniform grid over `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialDensity {
    pub dim: usize,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl RadialDensity {
    /// Radial law of a rotation-invariant density `x ↦ φ(‖x‖)` in `dim`
    /// dimensions: tabulates `t^{p-1} φ(t)`.
    pub fn from_profile(dim: usize, t_max: f64, points: usize, mut profile: impl FnMut(f64) -> f64) -> Result<Self> {
        if dim == 0 || points < 2 || !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "radial grid needs dim >= 1, >= 2 points and T > 0 (dim={dim}, points={points}, T={t_max})"
            )));
        }
        let spacing = t_max / (points - 1) as f64;
        let values: Vec<f64> = (0..points)
            .map(|i| {
                let t = i as f64 * spacing;
                let area = if dim == 1 { 1.0 } else { t.powi(dim as i32 - 1) };
                (area * profile(t)).max(0.0)
            })
            .collect();
        let out = Self { dim, spacing, values };
        let mass = out.total_mass();
        if !(mass > 1e-300) || !mass.is_finite() {
            return Err(Error::DegenerateDensity(mass));
        }
        Ok(out)
    }

    pub fn t_max(&self) -> f64 {
        self.spacing * (self.values.len() - 1) as f64
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative().last().unwrap_or(&0.0)
    }

    /// Trapezoid cumulative mass at every node (unnormalized).
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.values.len());
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * self.spacing;
            out.push(acc);
        }
        out
    }

    /// Normalized mass on `(t, T]`.
    pub fn mass_beyond(&self, t: f64) -> f64 {
        let cdf = self.cumulative();
        let total = *cdf.last().unwrap();
        let pos = (t / self.spacing).clamp(0.0, (cdf.len() - 1) as f64);
        let i = (pos.floor() as usize).min(cdf.len() - 2);
        let frac = pos - i as f64;
        // linear density inside the cell
        let (a, b) = (self.values[i], self.values[i + 1]);
        let part = self.spacing * (a * frac + 0.5 * (b - a) * frac * frac);
        (total - cdf[i] - part).max(0.0) / total
    }

    /// Quantile function sampled at `u_k = (k + ½)/count`.
    pub fn quantiles(&self, count: usize) -> Vec<f64> {
        let cdf = self.cumulative();
        let total = *cdf.last().unwrap();
        let mut out = Vec::with_capacity(count);
        let mut idx = 1;
        for k in 0..count {
            let target = (k as f64 + 0.5) / count as f64 * total;
            while idx < cdf.len() - 1 && cdf[idx] < target {
                idx += 1;
            }
            let (lo, hi) = (cdf[idx - 1], cdf[idx]);
            let frac = if hi > lo { (target - lo) / (hi - lo) } else { 0.0 };
            out.push((idx - 1) as f64 * self.spacing + frac.clamp(0.0, 1.0) * self.spacing);
        }
        out
    }
}

/// `W_q` between the radial laws, via the monotone (quantile) coupling.
pub fn radial_wasserstein(q: f64, a: &RadialDensity, b: &RadialDensity) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!("order q must be >= 1, got {q}")));
    }
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    for d in [a, b] {
        let m = d.total_mass();
        if !(m > 1e-300) {
            return Err(Error::DegenerateDensity(m));
        }
    }
    let qa = a.quantiles(QUANTILE_POINTS);
    let qb = b.quantiles(QUANTILE_POINTS);
    let sum: f64 = qa.iter().zip(&qb).map(|(x, y)| (x - y).abs().powf(q)).sum();
    Ok((sum / QUANTILE_POINTS as f64).powf(1.0 / q))
}

fn isotropic_gaussian_scale(f: &Potential) -> Result<f64> {
    match f.form() {
        PotentialForm::Quadratic { center, precision } => {
            let c = precision.lambda_max();
            if center.iter().any(|&x| x != 0.0) || (c - precision.lambda_min()).abs() > 1e-12 * c {
                return Err(Error::InvalidArgument(
                    "radial densities need an isotropic Gaussian centered at the origin".into(),
                ));
            }
            Ok(c)
        }
        PotentialForm::Custom { .. } => Err(Error::InvalidArgument(
            "radial densities need a quadratic potential".into(),
        )),
    }
}

fn centered_ball_radius(body: &ConvexBody) -> Result<f64> {
    match body.shape() {
        Shape::Ball { center, radius } if center.iter().all(|&c| c == 0.0) => Ok(*radius),
        _ => Err(Error::InvalidArgument("radial densities need a ball centered at the origin".into())),
    }
}

/// Radial law of `∝ exp(-f - d_K/(2λ²))` for an isotropic Gaussian `f` and a
/// centered ball. With `penalty = None` the hard constraint `1_K` is used.
/// The grid extends until the neglected tail is far below `1e-12`.
pub fn surrogate_radial_density(
    f: &Potential,
    body: &ConvexBody,
    penalty: Option<&Penalty>,
    points: usize,
) -> Result<RadialDensity> {
    let c = isotropic_gaussian_scale(f)?;
    let rho = centered_ball_radius(body)?;
    let dim = body.dim();
    let gaussian_tail = ((dim as f64).sqrt() + GAUSSIAN_TAIL_OFFSET) / c.sqrt();
    match penalty {
        None => RadialDensity::from_profile(dim, rho, points, |t| (-0.5 * c * t * t).exp()),
        Some(pen) => {
            let width = pen.lambda / pen.c1.sqrt();
            let t_max = (rho + PENALTY_TAIL_WIDTHS * width).min(gaussian_tail.max(rho));
            let weight = 1.0 / (2.0 * pen.lambda * pen.lambda);
            let mut axis = vec![0.0; dim];
            let mut err = None;
            let out = RadialDensity::from_profile(dim, t_max, points, |t| {
                axis[0] = t;
                let d = pen.distance(body, &axis).unwrap_or_else(|e| {
                    err = Some(e);
                    0.0
                });
                (-0.5 * c * t * t - weight * d).exp()
            });
            match err {
                Some(e) => Err(e),
                None => out,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_shift() {
        let a = RadialDensity::from_profile(1, 1.0, GRID_POINTS, |_| 1.0).unwrap();
        let b = RadialDensity::from_profile(1, 1.1, GRID_POINTS, |_| 1.0).unwrap();
        assert!((radial_wasserstein(1.0, &a, &b).unwrap() - 0.05).abs() < 1e-6);
        assert_eq!(radial_wasserstein(2.0, &a, &a).unwrap(), 0.0);
        assert!(RadialDensity::from_profile(1, 1.0, 10, |_| 0.0).is_err());
    }

    #[test]
    fn inside_matches_unpenalized_profile() {
        let body = ConvexBody::centered_ball(2, 0.5).unwrap();
        let f = Potential::standard_gaussian(2);
        let pen = Penalty::euclidean(0.05, &body).unwrap();
        let d = surrogate_radial_density(&f, &body, Some(&pen), 1001).unwrap();
        for i in 0..100 {
            let t = i as f64 * d.spacing;
            if t <= 0.5 {
                assert_eq!(d.values[i], t * (-0.5 * t * t).exp());
            }
        }
    }

    #[test]
    fn exterior_mass_shrinks_like_lambda() {
        let body = ConvexBody::centered_ball(2, 0.5).unwrap();
        let f = Potential::standard_gaussian(2);
        let mut ratios = Vec::new();
        for lambda in [1e-2, 1e-3] {
            let pen = Penalty::euclidean(lambda, &body).unwrap();
            let d = surrogate_radial_density(&f, &body, Some(&pen), GRID_POINTS).unwrap();
            ratios.push(d.mass_beyond(0.5) / lambda);
        }
        assert!(ratios.iter().all(|r| r.is_finite() && *r < 10.0));
        assert!((ratios[0] / ratios[1] - 1.0).abs() < 0.05, "{ratios:?}");
    }

    #[test]
    fn rejects_anisotropic_setups() {
        let body = ConvexBody::centered_ball(2, 0.5).unwrap();
        let shifted = Potential::quadratic(vec![0.1, 0.0], crate::linalg::SpdMatrix::identity(2)).unwrap();
        assert!(surrogate_radial_density(&shifted, &body, None, 100).is_err());
        let simplex = ConvexBody::shifted_simplex();
        assert!(surrogate_radial_density(&Potential::standard_gaussian(2), &simplex, None, 100).is_err());
    }
}
