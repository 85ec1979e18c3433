//! Overdamped and kinetic Langevin samplers on the surrogate potential.

mod kernels;
pub mod noise;
pub mod rng;

pub use kernels::{
    cklmc_step, cklmc_step_with, clmc_step, clmc_step_with, crklmc_step, crklmc_step_with, crlmc_step,
    crlmc_step_with, Algorithm, ChainState, CklmcDraw, ClmcDraw, CrklmcDraw, CrlmcDraw, KineticState,
};
pub use noise::{kinetic_noise_covariance_pair, kinetic_noise_covariance_triple, psi, NoiseCovariance3, PairCovariance};
pub use rng::ChainRng;

use crate::error::{check_dim, Error, Result};
use crate::potential::SurrogatePotential;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOptions {
    pub algo: Algorithm,
    pub n: usize,
    pub h: f64,
    /// Friction; required for kinetic algorithms.
    pub gamma: Option<f64>,
    /// Step multiplier applied while the current iterate lies in the body.
    /// `1.0` runs the plain schemes.
    pub inside_scale: f64,
    pub seed: u64,
    pub chain_id: u64,
    /// Keep every iterate; otherwise only the first and last.
    pub record_trace: bool,
}

impl ChainOptions {
    pub fn new(algo: Algorithm, n: usize, h: f64, seed: u64, chain_id: u64) -> Self {
        Self {
            algo,
            n,
            h,
            gamma: None,
            inside_scale: 1.0,
            seed,
            chain_id,
            record_trace: true,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub positions: Vec<Vec<f64>>,
    pub grad_evals: u64,
    pub steps: usize,
}

impl ChainTrace {
    pub fn last(&self) -> &[f64] {
        self.positions.last().expect("trace holds at least the initial point")
    }
}

enum State {
    Overdamped(ChainState),
    Kinetic(KineticState),
}

/// Runs `n` steps of `opts.algo` from `init`.
pub fn run_chain(sp: &SurrogatePotential, init: &[f64], opts: &ChainOptions) -> Result<ChainTrace> {
    check_dim(sp.dim(), init.len())?;
    if !(opts.inside_scale.is_finite() && opts.inside_scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "inside_scale must be positive, got {}",
            opts.inside_scale
        )));
    }
    let bound = sp.smoothness_bound();
    if opts.h * bound >= 1.0 && opts.chain_id == 0 {
        log::warn!("{}: step h={} is not below 1/M^λ={}", opts.algo, opts.h, 1.0 / bound);
    }
    let rng = ChainRng::new(opts.seed, opts.chain_id);
    let mut state = if opts.algo.is_kinetic() {
        let gamma = opts
            .gamma
            .ok_or_else(|| Error::InvalidArgument(format!("{} needs a friction γ", opts.algo)))?;
        State::Kinetic(KineticState::new(init.to_vec(), gamma, opts.h, rng)?)
    } else {
        State::Overdamped(ChainState::new(init.to_vec(), opts.h, rng)?)
    };
    let mut positions = vec![init.to_vec()];
    for _ in 0..opts.n {
        let step_h = |x: &[f64]| {
            if opts.inside_scale != 1.0 && sp.body.contains(x) {
                opts.h * opts.inside_scale
            } else {
                opts.h
            }
        };
        let pos = match &mut state {
            State::Overdamped(s) => {
                s.h = step_h(&s.position);
                match opts.algo {
                    Algorithm::Clmc => clmc_step(s, sp)?,
                    _ => crlmc_step(s, sp)?,
                }
                &s.position
            }
            State::Kinetic(s) => {
                s.h = step_h(&s.position);
                match opts.algo {
                    Algorithm::Cklmc => cklmc_step(s, sp)?,
                    _ => crklmc_step(s, sp)?,
                }
                &s.position
            }
        };
        if opts.record_trace {
            positions.push(pos.clone());
        }
    }
    let (grad_evals, last) = match state {
        State::Overdamped(s) => (s.grad_evals, s.position),
        State::Kinetic(s) => (s.grad_evals, s.position),
    };
    if !opts.record_trace && opts.n > 0 {
        positions.push(last);
    }
    Ok(ChainTrace {
        positions,
        grad_evals,
        steps: opts.n,
    })
}
