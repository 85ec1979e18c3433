use constrained_sampling::geometry::{ConvexBody, Penalty};
use constrained_sampling::linalg::SpdMatrix;
use constrained_sampling::potential::{Potential, SurrogatePotential};
use constrained_sampling::samplers::{
    crklmc_step, run_chain, Algorithm, ChainOptions, ChainRng, KineticState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Quadratic `L‖x‖²/2` on a ball far larger than its mass, so the penalty
/// never acts.
fn free_quadratic(l: f64) -> SurrogatePotential {
    let body = ConvexBody::centered_ball(2, 100.0).unwrap();
    let f = Potential::quadratic(vec![0.0, 0.0], SpdMatrix::diagonal(&[l, l]).unwrap()).unwrap();
    SurrogatePotential::new(f, Penalty::euclidean(1.0, &body).unwrap(), body).unwrap()
}

fn ball_setup() -> SurrogatePotential {
    let body = ConvexBody::centered_ball(2, 0.5).unwrap();
    let pen = Penalty::euclidean(0.1, &body).unwrap();
    SurrogatePotential::new(Potential::standard_gaussian(2), pen, body).unwrap()
}

#[test]
fn run_chain_contract() {
    let sp = ball_setup();
    let opts = ChainOptions::new(Algorithm::Crlmc, 0, 1e-3, 1, 0);
    let t = run_chain(&sp, &[0.2, 0.1], &opts).unwrap();
    assert_eq!(t.positions, vec![vec![0.2, 0.1]]);
    assert_eq!(t.grad_evals, 0);

    let opts = ChainOptions::new(Algorithm::Crlmc, 1000, 1e-3, 1, 0);
    let a = run_chain(&sp, &[0.0, 0.0], &opts).unwrap();
    let b = run_chain(&sp, &[0.0, 0.0], &opts).unwrap();
    assert_eq!(a.grad_evals, 2000);
    assert_eq!(a, b);
    let other = run_chain(&sp, &[0.0, 0.0], &ChainOptions::new(Algorithm::Crlmc, 1000, 1e-3, 1, 1)).unwrap();
    assert_ne!(a.last(), other.last());
}

#[test]
fn kinetic_chains_need_friction() {
    let sp = ball_setup();
    let opts = ChainOptions::new(Algorithm::Cklmc, 10, 1e-3, 1, 0);
    assert!(run_chain(&sp, &[0.0, 0.0], &opts).is_err());
    let t = run_chain(&sp, &[0.0, 0.0], &opts.with_gamma(505.0)).unwrap();
    assert_eq!(t.grad_evals, 10);
}

fn stationary_variance(sp: &SurrogatePotential, algo: Algorithm, h: f64, seed: u64) -> f64 {
    let burn = 2_000;
    let n = 40_000;
    let opts = ChainOptions::new(algo, n, h, seed, 0);
    let trace = run_chain(sp, &[0.0, 0.0], &opts).unwrap();
    let xs: Vec<f64> = trace.positions[burn..].iter().flatten().copied().collect();
    xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64
}

#[test]
fn randomized_midpoint_reduces_stationary_bias() {
    // target variance 1/L; the Euler scheme settles at 1/(L(1 - hL/2))
    let l = 100.0;
    let h = 0.005;
    let sp = free_quadratic(l);
    for seed in 0..10 {
        let clmc = stationary_variance(&sp, Algorithm::Clmc, h, seed) * l;
        let crlmc = stationary_variance(&sp, Algorithm::Crlmc, h, seed) * l;
        assert!((clmc - 4.0 / 3.0).abs() < 0.08, "seed {seed}: CLMC var·L {clmc}");
        assert!((crlmc - 1.0).abs() < (clmc - 1.0).abs(), "seed {seed}: {crlmc} vs {clmc}");
    }
}

/// Euler–Maruyama for `dθ = v dt`, `dv = -γ(v + ∇U) dt + √2 γ dW` with
/// `U = ‖θ‖²/2`.
fn fine_step(theta: [f64; 2], v: [f64; 2], gamma: f64, h: f64, steps: usize, rng: &mut ChaCha8Rng) -> [f64; 2] {
    let dt = h / steps as f64;
    let (mut x, mut v) = (theta, v);
    let sd = 2f64.sqrt() * gamma * dt.sqrt();
    for _ in 0..steps {
        for i in 0..2 {
            let z: f64 = StandardNormal.sample(rng);
            let nv = v[i] - gamma * (v[i] + x[i]) * dt + sd * z;
            x[i] += v[i] * dt;
            v[i] = nv;
        }
    }
    x
}

fn moments(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let n = points.len() as f64;
    let mut mean = [0.0; 2];
    let mut sd = [0.0; 2];
    for i in 0..2 {
        mean[i] = points.iter().map(|p| p[i]).sum::<f64>() / n;
        sd[i] = (points.iter().map(|p| (p[i] - mean[i]).powi(2)).sum::<f64>() / n).sqrt();
    }
    (mean, sd)
}

#[test]
fn crklmc_one_step_matches_fine_discretization() {
    let sp = free_quadratic(1.0);
    let (gamma, h) = (2.0, 0.1);
    let theta = [1.0, -0.5];
    let v0 = [0.3, 0.0];
    let n = 100_000;
    let coarse: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let mut st = KineticState::new(theta.to_vec(), gamma, h, ChainRng::new(5, i)).unwrap();
            st.velocity = v0.to_vec();
            crklmc_step(&mut st, &sp).unwrap();
            [st.position[0], st.position[1]]
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fine: Vec<[f64; 2]> = (0..n).map(|_| fine_step(theta, v0, gamma, h, 1000, &mut rng)).collect();
    // both one-step laws are Gaussian here, so W2 follows from the moments
    let (mc, sc) = moments(&coarse);
    let (mf, sf) = moments(&fine);
    let w2 = (0..2).map(|i| (mc[i] - mf[i]).powi(2) + (sc[i] - sf[i]).powi(2)).sum::<f64>().sqrt();
    let bound = 5.0 * (gamma * h).powf(1.5) * 2f64.sqrt();
    assert!(w2 <= bound, "W2 {w2} > {bound}");
    // and far tighter in practice
    assert!(w2 < 5e-3, "W2 {w2}");
}
