use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ResolvedConfig, RunConfig};
use super::HarnessError;
use crate::metrics::{
    rejection_sample_target, sliced_wasserstein, wasserstein_empirical, EmpiricalMeasure, MAX_ASSIGNMENT_SIZE,
};
use crate::potential::SurrogatePotential;
use crate::samplers::{run_chain, Algorithm, ChainOptions};

/// RNG stream reserved for ground-truth draws.
pub const GROUND_TRUTH_STREAM: u64 = u64::MAX;
/// Projections used when the sample size exceeds the exact solver limit.
pub const SLICED_PROJECTIONS: usize = 500;

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub algo: Algorithm,
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "N")]
    pub samples: usize,
    pub h: f64,
    pub lambda: f64,
    pub gamma: Option<f64>,
    pub smoothness_bound: f64,
    pub w1: f64,
    pub w2: f64,
    pub grad_evals: u64,
    pub wall_ms: f64,
    #[serde(skip)]
    pub final_positions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundTruthRecord {
    pub seed: u64,
    pub acceptance_rate: f64,
    #[serde(skip)]
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: RunConfig,
    pub runs: Vec<RunRecord>,
    pub ground_truth: Vec<GroundTruthRecord>,
    /// `true` when every `(algorithm, seed)` pair finished.
    pub complete: bool,
}

impl ExperimentReport {
    pub fn median(&self, algo: Algorithm, pick: impl Fn(&RunRecord) -> f64) -> Option<f64> {
        let mut v: Vec<f64> = self.runs.iter().filter(|r| r.algo == algo).map(pick).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let k = v.len();
        Some(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
    }

    /// Medians of `w1`, `w2` and `wall_ms` per algorithm.
    pub fn aggregates(&self) -> BTreeMap<String, BTreeMap<&'static str, f64>> {
        let mut out = BTreeMap::new();
        for &algo in &self.config.algorithms {
            let mut m = BTreeMap::new();
            for (key, f) in [
                ("median_w1", (|r: &RunRecord| r.w1) as fn(&RunRecord) -> f64),
                ("median_w2", |r: &RunRecord| r.w2),
                ("median_wall_ms", |r: &RunRecord| r.wall_ms),
            ] {
                if let Some(v) = self.median(algo, f) {
                    m.insert(key, v);
                }
            }
            out.insert(algo.to_string(), m);
        }
        out
    }
}

/// A failed run together with everything that finished before the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub partial: ExperimentReport,
    pub error: HarnessError,
}

fn distances(a: &EmpiricalMeasure, b: &EmpiricalMeasure, seed: u64) -> crate::Result<(f64, f64)> {
    if a.len() <= MAX_ASSIGNMENT_SIZE {
        Ok((wasserstein_empirical(1.0, a, b)?, wasserstein_empirical(2.0, a, b)?))
    } else {
        Ok((
            sliced_wasserstein(1.0, a, b, SLICED_PROJECTIONS, seed)?,
            sliced_wasserstein(2.0, a, b, SLICED_PROJECTIONS, seed)?,
        ))
    }
}

fn ground_truth(resolved: &ResolvedConfig, seed: u64) -> crate::Result<GroundTruthRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(GROUND_TRUTH_STREAM);
    let s = rejection_sample_target(&resolved.potential, &resolved.body, resolved.config.samples, &mut rng)?;
    Ok(GroundTruthRecord {
        seed,
        acceptance_rate: s.acceptance_rate(),
        points: s.measure.into_points(),
    })
}

fn run_one(resolved: &ResolvedConfig, algo: Algorithm, seed: u64, truth: &EmpiricalMeasure) -> crate::Result<RunRecord> {
    let cfg = &resolved.config;
    let penalty = resolved.penalty(algo)?;
    let lambda = penalty.lambda;
    let sp = SurrogatePotential::new(resolved.potential.clone(), penalty, resolved.body.clone())?;
    let bound = sp.smoothness_bound();
    let gamma = algo.is_kinetic().then(|| cfg.gamma_factor * bound);
    let init = sp.potential.minimizer().to_vec();
    let start = Instant::now();
    let chains: Vec<crate::Result<(Vec<f64>, u64)>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let opts = ChainOptions {
                algo,
                n: cfg.n,
                h: cfg.h,
                gamma,
                inside_scale: cfg.inside_scale,
                seed,
                chain_id: i as u64,
                record_trace: false,
            };
            let t = run_chain(&sp, &init, &opts)?;
            Ok((t.last().to_vec(), t.grad_evals))
        })
        .collect();
    let mut final_positions = Vec::with_capacity(cfg.samples);
    let mut grad_evals = 0;
    for c in chains {
        let (p, g) = c?;
        final_positions.push(p);
        grad_evals += g;
    }
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let measure = EmpiricalMeasure::new(final_positions)?;
    let (w1, w2) = distances(&measure, truth, seed)?;
    Ok(RunRecord {
        algo,
        seed,
        n: cfg.n,
        samples: cfg.samples,
        h: cfg.h,
        lambda,
        gamma,
        smoothness_bound: bound,
        w1,
        w2,
        grad_evals,
        wall_ms,
        final_positions: measure.into_points(),
    })
}

/// Runs every `(algorithm, seed)` pair: `N` independent chains of `n` steps
/// from the minimizer of `f`, compared against `N` exact draws of the target.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport, RunFailure> {
    let mut report = ExperimentReport {
        config: cfg.clone(),
        runs: Vec::new(),
        ground_truth: Vec::new(),
        complete: false,
    };
    let resolved = match cfg.resolve() {
        Ok(r) => r,
        Err(error) => return Err(RunFailure { partial: report, error }),
    };
    for &seed in &cfg.seeds {
        let truth = match ground_truth(&resolved, seed) {
            Ok(t) => t,
            Err(e) => {
                return Err(RunFailure {
                    partial: report,
                    error: e.into(),
                })
            }
        };
        let truth_measure = EmpiricalMeasure::new(truth.points.clone()).expect("accepted points are finite");
        report.ground_truth.push(truth);
        for &algo in &cfg.algorithms {
            match run_one(&resolved, algo, seed, &truth_measure) {
                Ok(rec) => {
                    log::info!("{algo} seed {seed}: w1={:.4} w2={:.4}", rec.w1, rec.w2);
                    report.runs.push(rec);
                }
                Err(e) => {
                    return Err(RunFailure {
                        partial: report,
                        error: HarnessError::Run(e),
                    })
                }
            }
        }
    }
    report.complete = true;
    Ok(report)
}
