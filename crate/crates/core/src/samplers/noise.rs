//! Closed-form Gaussian noise laws of the kinetic integrators.
//!
//! Velocity obeys `dV = -γ(V + ∇U) dt + √2 γ dW`. Over one step with frozen
//! drift the noise pair is `η_v = √2 γ ∫ e^{-γ(h-s)} dW_s` and
//! `η_x = √2 ∫ (1 - e^{-γ(h-s)}) dW_s`. The randomized-midpoint scheme works
//! in unit time with `B` a Brownian motion, `a = γh` and
//! `G_t = ∫_0^t e^{a s} dB_s`.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as rounding and clipped to zero.
pub const EIGEN_CLIP: f64 = 1e-12;

/// `ψ(x) = (1 - e^{-x}) / x`, with `ψ(0) = 1`.
pub fn psi(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x / 2.0 + x * x / 6.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Per-coordinate covariance of `(η_x, η_v)` for one frozen-drift step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCovariance {
    pub xx: f64,
    pub xv: f64,
    pub vv: f64,
}

impl PairCovariance {
    /// Lower Cholesky factor `[[l11, 0], [l21, l22]]`.
    pub fn cholesky(&self) -> (f64, f64, f64) {
        let l11 = self.xx.max(0.0).sqrt();
        let l21 = if l11 > 0.0 { self.xv / l11 } else { 0.0 };
        let l22 = (self.vv - l21 * l21).max(0.0).sqrt();
        (l11, l21, l22)
    }
}

pub fn kinetic_noise_covariance_pair(gamma: f64, h: f64) -> PairCovariance {
    let a = gamma * h;
    let e1 = -(-a).exp_m1();
    let e2 = -(-2.0 * a).exp_m1();
    let xx = if a < 1e-3 {
        // ∫_0^a (1 - e^{-x})² dx, series
        2.0 / gamma * (a.powi(3) / 3.0 - a.powi(4) / 4.0 + 7.0 * a.powi(5) / 60.0 - a.powi(6) / 24.0)
    } else {
        2.0 * (h - 2.0 * e1 / gamma + e2 / (2.0 * gamma))
    };
    PairCovariance {
        xx,
        xv: e1 * e1,
        vv: gamma * e2,
    }
}

/// Covariance of `(ξ', ξ'', ξ''')` per coordinate, with a clipped square-root
/// factor for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCovariance3 {
    pub matrix: Matrix3<f64>,
    /// Smallest eigenvalue before clipping.
    pub min_eigenvalue: f64,
    factor: Matrix3<f64>,
}

impl NoiseCovariance3 {
    /// `L` with `L Lᵀ = Σ` (after clipping).
    pub fn factor(&self) -> &Matrix3<f64> {
        &self.factor
    }

    /// Maps three independent standard normals to one draw of the triple.
    pub fn transform(&self, z: [f64; 3]) -> [f64; 3] {
        let f = &self.factor;
        [
            f[(0, 0)] * z[0] + f[(0, 1)] * z[1] + f[(0, 2)] * z[2],
            f[(1, 0)] * z[0] + f[(1, 1)] * z[1] + f[(1, 2)] * z[2],
            f[(2, 0)] * z[0] + f[(2, 1)] * z[1] + f[(2, 2)] * z[2],
        ]
    }
}

/// `(e^{a m} - 1)/a` scaled by `e^{-a t}`, written with non-positive exponents.
fn cov_b_h(a: f64, s: f64, t: f64) -> f64 {
    // Cov(B_s, e^{-a t} G_t)
    let m = s.min(t);
    if a == 0.0 {
        return m;
    }
    ((a * (m - t)).exp() - (-a * t).exp()) / a
}

fn cov_h_h(a: f64, s: f64, t: f64) -> f64 {
    // Cov(e^{-a s} G_s, e^{-a t} G_t)
    let m = s.min(t);
    if a == 0.0 {
        return m;
    }
    ((a * (2.0 * m - s - t)).exp() - (-a * (s + t)).exp()) / (2.0 * a)
}

/// Covariance of `(B_u - e^{-au} G_u, B_1 - e^{-a} G_1, γ e^{-a} G_1)` with
/// `a = γh`, assembled by bilinearity over the basis
/// `(B_u, H_u, B_1, H_1)` where `H_t = e^{-a t} G_t`.
pub fn kinetic_noise_covariance_triple(gamma: f64, h: f64, u: f64) -> Result<NoiseCovariance3> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("midpoint fraction u={u} outside [0, 1]")));
    }
    if !(gamma > 0.0 && h > 0.0) {
        return Err(Error::Domain(format!("need γh > 0, got γ={gamma}, h={h}")));
    }
    let a = gamma * h;
    let times = [u, u, 1.0, 1.0];
    let is_h = [false, true, false, true];
    let mut base = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            base[i][j] = match (is_h[i], is_h[j]) {
                (false, false) => times[i].min(times[j]),
                (false, true) => cov_b_h(a, times[i], times[j]),
                (true, false) => cov_b_h(a, times[j], times[i]),
                (true, true) => cov_h_h(a, times[i], times[j]),
            };
        }
    }
    let coeffs = [
        [1.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, -1.0],
        [0.0, 0.0, 0.0, gamma],
    ];
    let mut sigma = Matrix3::zeros();
    for r in 0..3 {
        for c in 0..3 {
            let mut acc = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    acc += coeffs[r][i] * base[i][j] * coeffs[c][j];
                }
            }
            sigma[(r, c)] = acc;
        }
    }
    let eig = SymmetricEigen::new(sigma);
    let min_eigenvalue = eig.eigenvalues.min();
    let scale = sigma.diagonal().max().max(f64::MIN_POSITIVE);
    let roots = eig.eigenvalues.map(|l| {
        if l <= EIGEN_CLIP * scale {
            0.0
        } else {
            l.sqrt()
        }
    });
    let factor = eig.eigenvectors * Matrix3::from_diagonal(&roots);
    Ok(NoiseCovariance3 {
        matrix: sigma,
        min_eigenvalue,
        factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_examples() {
        assert_eq!(psi(0.0), 1.0);
        assert!((psi(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((psi(1.0) - 0.6321206).abs() < 1e-7);
        assert_eq!(psi(1e-8), 1.0 - 5e-9);
        // both branches agree at the switch point
        let x = 1e-4;
        assert!((psi(x * (1.0 - 1e-12)) - psi(x)).abs() < 1e-13);
    }

    #[test]
    fn pair_closed_forms() {
        let c = kinetic_noise_covariance_pair(1.0, 1.0);
        assert!((c.vv - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!((c.vv - 0.864665).abs() < 1e-6);
        assert!((c.xv - 0.399576).abs() < 1e-6);
        let small = kinetic_noise_covariance_pair(1.0, 1e-3);
        let lead = 2.0 * 1e-9 / 3.0;
        assert!((small.xx / lead - 1.0).abs() < 5e-3);
        // series and closed form agree across the branch switch
        let lo = kinetic_noise_covariance_pair(1.0, 0.999_999e-3);
        let hi = kinetic_noise_covariance_pair(1.0, 1.000_001e-3);
        assert!((lo.xx / hi.xx - 1.0).abs() < 1e-5);
    }

    #[test]
    fn triple_examples() {
        let t = kinetic_noise_covariance_triple(1.0, 1.0, 0.0).unwrap();
        assert_eq!(t.matrix[(0, 0)], 0.0);
        assert_eq!(t.matrix[(0, 1)], 0.0);
        let t = kinetic_noise_covariance_triple(1.0, 1.0, 0.5).unwrap();
        let e = std::f64::consts::E;
        let expected = 0.5 - 2.0 * (-0.5f64).exp() * (0.5f64.exp() - 1.0) + (e - 1.0) / (2.0 * e);
        assert!((t.matrix[(0, 0)] - expected).abs() < 1e-14);
        assert!((t.matrix[(0, 0)] - 0.029121).abs() < 1e-6);
        assert!(kinetic_noise_covariance_triple(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn triple_matches_pair_at_full_step() {
        // at u = 1 the first two coordinates coincide and the last two carry
        // the frozen-drift pair up to the √(2h) scaling
        let (gamma, h) = (3.0, 0.2);
        let t = kinetic_noise_covariance_triple(gamma, h, 1.0).unwrap();
        let pair = kinetic_noise_covariance_pair(gamma, h);
        let s = 2.0 * h;
        assert!((s * t.matrix[(1, 1)] - pair.xx).abs() < 1e-12);
        assert!((s * t.matrix[(1, 2)] - pair.xv).abs() < 1e-12);
        assert!((s * t.matrix[(2, 2)] - pair.vv).abs() < 1e-12);
        assert!((t.matrix[(0, 0)] - t.matrix[(1, 1)]).abs() < 1e-15);
    }

    #[test]
    fn triple_is_psd_on_grid() {
        for i in 0..50 {
            let a = 10f64.powf(-3.0 + 5.0 * i as f64 / 49.0);
            for j in 0..50 {
                let u = j as f64 / 49.0;
                let t = kinetic_noise_covariance_triple(1.0, a, u).unwrap();
                let scale = t.matrix.diagonal().max().max(1e-300);
                assert!(t.min_eigenvalue >= -1e-12 * scale.max(1.0), "a={a} u={u}: {}", t.min_eigenvalue);
                let rebuilt = t.factor() * t.factor().transpose();
                assert!((rebuilt - t.matrix).amax() <= 1e-10 * scale.max(1.0));
            }
        }
    }
}
