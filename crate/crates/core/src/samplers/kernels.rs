//! One-step transition kernels.
//!
//! Each kernel is split into a draw (all randomness for the step) and a
//! deterministic update, so tests can force individual noise components.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::noise::{kinetic_noise_covariance_pair, kinetic_noise_covariance_triple, psi};
use super::rng::ChainRng;
use crate::error::{check_dim, Error, Result};
use crate::linalg::norm;
use crate::potential::SurrogatePotential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Clmc,
    Cklmc,
    Crlmc,
    Crklmc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Clmc, Algorithm::Cklmc, Algorithm::Crlmc, Algorithm::Crklmc];

    pub fn is_kinetic(self) -> bool {
        matches!(self, Algorithm::Cklmc | Algorithm::Crklmc)
    }

    pub fn grads_per_step(self) -> u64 {
        match self {
            Algorithm::Clmc | Algorithm::Cklmc => 1,
            Algorithm::Crlmc | Algorithm::Crklmc => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Clmc => "clmc",
            Algorithm::Cklmc => "cklmc",
            Algorithm::Crlmc => "crlmc",
            Algorithm::Crklmc => "crklmc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clmc" => Ok(Algorithm::Clmc),
            "cklmc" => Ok(Algorithm::Cklmc),
            "crlmc" => Ok(Algorithm::Crlmc),
            "crklmc" => Ok(Algorithm::Crklmc),
            other => Err(Error::InvalidArgument(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Overdamped chain state.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub position: Vec<f64>,
    pub h: f64,
    pub rng: ChainRng,
    pub grad_evals: u64,
    pub step: u64,
}

impl ChainState {
    pub fn new(position: Vec<f64>, h: f64, rng: ChainRng) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
        }
        Ok(Self {
            position,
            h,
            rng,
            grad_evals: 0,
            step: 0,
        })
    }
}

/// Kinetic chain state.
#[derive(Debug, Clone)]
pub struct KineticState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub gamma: f64,
    pub h: f64,
    pub rng: ChainRng,
    pub grad_evals: u64,
    pub step: u64,
}

impl KineticState {
    /// Draws the initial velocity from `N(0, γ I)`.
    pub fn new(position: Vec<f64>, gamma: f64, h: f64, mut rng: ChainRng) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("friction must be positive, got {gamma}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
        }
        rng.begin_init();
        let sd = gamma.sqrt();
        let velocity = (0..position.len()).map(|_| sd * rng.normal()).collect();
        Ok(Self {
            position,
            velocity,
            gamma,
            h,
            rng,
            grad_evals: 0,
            step: 0,
        })
    }
}

fn grad(sp: &SurrogatePotential, x: &[f64], counter: &mut u64) -> Result<Vec<f64>> {
    *counter += 1;
    sp.gradient(x)
}

fn check_finite(x: &[f64], step: u64) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            step: step as usize,
            norm: norm(x),
        })
    }
}

// ---------------------------------------------------------------- CLMC

/// Standard-normal increment for one Euler step.
#[derive(Debug, Clone, PartialEq)]
pub struct ClmcDraw {
    pub xi: Vec<f64>,
}

impl ClmcDraw {
    pub fn sample(rng: &mut ChainRng, dim: usize) -> Self {
        Self { xi: rng.normals(dim) }
    }
}

/// `θ' = θ - h ∇U(θ) + √(2h) ξ`.
pub fn clmc_step_with(state: &mut ChainState, sp: &SurrogatePotential, draw: &ClmcDraw) -> Result<()> {
    check_dim(state.position.len(), draw.xi.len())?;
    let h = state.h;
    let g = grad(sp, &state.position, &mut state.grad_evals)?;
    let s = (2.0 * h).sqrt();
    for ((x, gi), xi) in state.position.iter_mut().zip(&g).zip(&draw.xi) {
        *x += -h * gi + s * xi;
    }
    check_finite(&state.position, state.step)?;
    state.step += 1;
    Ok(())
}

pub fn clmc_step(state: &mut ChainState, sp: &SurrogatePotential) -> Result<()> {
    state.rng.begin_step(state.step);
    let draw = ClmcDraw::sample(&mut state.rng, state.position.len());
    clmc_step_with(state, sp, &draw)
}

// ---------------------------------------------------------------- CRLMC

/// Randomness of one randomized-midpoint step: the midpoint fraction `ι`,
/// the midpoint noise `ξ'` and the full-step increment
/// `ξ = √ι ξ' + √(1-ι) ξ''`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrlmcDraw {
    pub iota: f64,
    pub xi_mid: Vec<f64>,
    pub xi_full: Vec<f64>,
}

impl CrlmcDraw {
    /// From independent `ξ', ξ'' ~ N(0, I)`.
    pub fn from_independent(iota: f64, xi_prime: Vec<f64>, xi_second: Vec<f64>) -> Self {
        let (a, b) = (iota.sqrt(), (1.0 - iota).sqrt());
        let xi_full = xi_prime.iter().zip(&xi_second).map(|(p, q)| a * p + b * q).collect();
        Self {
            iota,
            xi_mid: xi_prime,
            xi_full,
        }
    }

    /// Samples the full increment first (the same normals a CLMC step would
    /// use) and then `ξ'` from its conditional law given the increment,
    /// `ξ' = √ι ξ + √(1-ι) ζ`. The joint law of `(ξ', ξ)` is the same as
    /// with independent `ξ', ξ''`.
    pub fn sample(rng: &mut ChainRng, dim: usize) -> Self {
        let xi_full = rng.normals(dim);
        let iota = rng.uniform();
        let zeta = rng.normals(dim);
        let (a, b) = (iota.sqrt(), (1.0 - iota).sqrt());
        let xi_mid = xi_full.iter().zip(&zeta).map(|(x, z)| a * x + b * z).collect();
        Self {
            iota,
            xi_mid,
            xi_full,
        }
    }
}

pub fn crlmc_step_with(state: &mut ChainState, sp: &SurrogatePotential, draw: &CrlmcDraw) -> Result<()> {
    let p = state.position.len();
    check_dim(p, draw.xi_mid.len())?;
    check_dim(p, draw.xi_full.len())?;
    let h = state.h;
    let iota = draw.iota;
    let g0 = grad(sp, &state.position, &mut state.grad_evals)?;
    let s_mid = (2.0 * h * iota).sqrt();
    let mid: Vec<f64> = state
        .position
        .iter()
        .zip(&g0)
        .zip(&draw.xi_mid)
        .map(|((x, g), xi)| x - h * iota * g + s_mid * xi)
        .collect();
    let g_mid = grad(sp, &mid, &mut state.grad_evals)?;
    let s = (2.0 * h).sqrt();
    for ((x, g), xi) in state.position.iter_mut().zip(&g_mid).zip(&draw.xi_full) {
        *x += -h * g + s * xi;
    }
    check_finite(&state.position, state.step)?;
    state.step += 1;
    Ok(())
}

pub fn crlmc_step(state: &mut ChainState, sp: &SurrogatePotential) -> Result<()> {
    state.rng.begin_step(state.step);
    let draw = CrlmcDraw::sample(&mut state.rng, state.position.len());
    crlmc_step_with(state, sp, &draw)
}

// ---------------------------------------------------------------- CKLMC

/// Joint position/velocity noise of one frozen-drift step.
#[derive(Debug, Clone, PartialEq)]
pub struct CklmcDraw {
    pub eta_x: Vec<f64>,
    pub eta_v: Vec<f64>,
}

impl CklmcDraw {
    pub fn sample(rng: &mut ChainRng, dim: usize, gamma: f64, h: f64) -> Self {
        let (l11, l21, l22) = kinetic_noise_covariance_pair(gamma, h).cholesky();
        let mut eta_x = Vec::with_capacity(dim);
        let mut eta_v = Vec::with_capacity(dim);
        for _ in 0..dim {
            let z1 = rng.normal();
            let z2 = rng.normal();
            eta_x.push(l11 * z1);
            eta_v.push(l21 * z1 + l22 * z2);
        }
        Self { eta_x, eta_v }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            eta_x: vec![0.0; dim],
            eta_v: vec![0.0; dim],
        }
    }
}

/// Exact integration of the kinetic dynamics with `∇U` frozen at `θ`.
pub fn cklmc_step_with(state: &mut KineticState, sp: &SurrogatePotential, draw: &CklmcDraw) -> Result<()> {
    let p = state.position.len();
    check_dim(p, draw.eta_x.len())?;
    check_dim(p, draw.eta_v.len())?;
    let (gamma, h) = (state.gamma, state.h);
    let a = gamma * h;
    let g = grad(sp, &state.position, &mut state.grad_evals)?;
    let decay = (-a).exp();
    let one_minus = -(-a).exp_m1();
    let ps = psi(a);
    for i in 0..p {
        let v = state.velocity[i];
        state.position[i] += h * ps * v - h * (1.0 - ps) * g[i] + draw.eta_x[i];
        state.velocity[i] = decay * v - one_minus * g[i] + draw.eta_v[i];
    }
    check_finite(&state.position, state.step)?;
    check_finite(&state.velocity, state.step)?;
    state.step += 1;
    Ok(())
}

pub fn cklmc_step(state: &mut KineticState, sp: &SurrogatePotential) -> Result<()> {
    state.rng.begin_step(state.step);
    let draw = CklmcDraw::sample(&mut state.rng, state.position.len(), state.gamma, state.h);
    cklmc_step_with(state, sp, &draw)
}

// ---------------------------------------------------------------- CRKLMC

/// Randomness of one kinetic randomized-midpoint step.
#[derive(Debug, Clone, PartialEq)]
pub struct CrklmcDraw {
    pub iota: f64,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
    pub xi3: Vec<f64>,
}

impl CrklmcDraw {
    pub fn sample(rng: &mut ChainRng, dim: usize, gamma: f64, h: f64) -> Result<Self> {
        let iota = rng.uniform();
        let cov = kinetic_noise_covariance_triple(gamma, h, iota)?;
        let mut xi1 = Vec::with_capacity(dim);
        let mut xi2 = Vec::with_capacity(dim);
        let mut xi3 = Vec::with_capacity(dim);
        for _ in 0..dim {
            let z = [rng.normal(), rng.normal(), rng.normal()];
            let t = cov.transform(z);
            xi1.push(t[0]);
            xi2.push(t[1]);
            xi3.push(t[2]);
        }
        Ok(Self { iota, xi1, xi2, xi3 })
    }

    pub fn zero(dim: usize, iota: f64) -> Self {
        Self {
            iota,
            xi1: vec![0.0; dim],
            xi2: vec![0.0; dim],
            xi3: vec![0.0; dim],
        }
    }
}

pub fn crklmc_step_with(state: &mut KineticState, sp: &SurrogatePotential, draw: &CrklmcDraw) -> Result<()> {
    let p = state.position.len();
    for xi in [&draw.xi1, &draw.xi2, &draw.xi3] {
        check_dim(p, xi.len())?;
    }
    let (gamma, h, iota) = (state.gamma, state.h, draw.iota);
    let a = gamma * h;
    let s = (2.0 * h).sqrt();
    let g0 = grad(sp, &state.position, &mut state.grad_evals)?;
    let psi_mid = psi(a * iota);
    let mid: Vec<f64> = (0..p)
        .map(|i| {
            state.position[i] + iota * h * psi_mid * state.velocity[i] - iota * h * (1.0 - psi_mid) * g0[i]
                + s * draw.xi1[i]
        })
        .collect();
    let g_mid = grad(sp, &mid, &mut state.grad_evals)?;
    let psi_full = psi(a);
    let rest = 1.0 - iota;
    let pos_coeff = gamma * h * h * rest * psi(a * rest);
    let vel_coeff = gamma * h * (-a * rest).exp();
    let decay = (-a).exp();
    for i in 0..p {
        let v = state.velocity[i];
        state.position[i] += h * psi_full * v - pos_coeff * g_mid[i] + s * draw.xi2[i];
        state.velocity[i] = decay * v - vel_coeff * g_mid[i] + s * draw.xi3[i];
    }
    check_finite(&state.position, state.step)?;
    check_finite(&state.velocity, state.step)?;
    state.step += 1;
    Ok(())
}

pub fn crklmc_step(state: &mut KineticState, sp: &SurrogatePotential) -> Result<()> {
    state.rng.begin_step(state.step);
    let draw = CrklmcDraw::sample(&mut state.rng, state.position.len(), state.gamma, state.h)?;
    crklmc_step_with(state, sp, &draw)
}
