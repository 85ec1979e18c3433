//! Parameter selection `(λ, h, n, γ)` from a target accuracy.
//!
//! Only exponents are meaningful; the hidden constants are replaced by a
//! single user constant on `h`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    W1,
    W2,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::W1 => "W1",
            Metric::W2 => "W2",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "W1" => Ok(Metric::W1),
            "W2" => Ok(Metric::W2),
            other => Err(Error::UnsupportedCombination(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRequest {
    pub algo: Algorithm,
    pub metric: Metric,
    pub epsilon: f64,
    pub p: usize,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    /// Smoothness constant of `d_K` as stored on a penalty (2 for Euclidean).
    pub m0: f64,
    #[serde(default = "one")]
    pub user_constant: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulePlan {
    pub lambda: f64,
    pub h: f64,
    pub n: u64,
    pub gamma: Option<f64>,
}

impl fmt::Display for SchedulePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda = {}", self.lambda)?;
        writeln!(f, "h = {}", self.h)?;
        writeln!(f, "n = {}", self.n)?;
        match self.gamma {
            Some(g) => writeln!(f, "gamma = {g}"),
            None => writeln!(f, "gamma = none"),
        }
    }
}

/// Exponent `e_h` in `h = C ε^{e_h}`.
pub fn step_exponent(algo: Algorithm, metric: Metric, p: usize) -> f64 {
    let p = p as f64;
    match (algo, metric) {
        (Algorithm::Clmc, Metric::W1) => 4.0,
        (Algorithm::Clmc, Metric::W2) => (6.0 * p + 4.0) / (p + 2.0),
        (Algorithm::Cklmc, Metric::W1) => 4.0,
        (Algorithm::Cklmc, Metric::W2) => (7.0 * p + 2.0) / (p + 2.0),
        (Algorithm::Crlmc, Metric::W1) => 10.0 / 3.0,
        (Algorithm::Crlmc, Metric::W2) => (18.0 * p + 4.0) / (3.0 * p + 6.0),
        (Algorithm::Crklmc, Metric::W1) => 8.0 / 3.0,
        (Algorithm::Crklmc, Metric::W2) => (15.0 * p + 2.0) / (3.0 * p + 6.0),
    }
}

/// Exponent `e_λ` in `λ = h^{e_λ}`.
pub fn lambda_exponent(algo: Algorithm, metric: Metric, p: usize) -> f64 {
    let p = p as f64;
    match (algo, metric) {
        (Algorithm::Clmc, Metric::W2) => p / (3.0 * p + 2.0),
        (Algorithm::Clmc, Metric::W1) => 0.25,
        (Algorithm::Cklmc, Metric::W2) => 2.0 * p / (7.0 * p + 2.0),
        (Algorithm::Cklmc, Metric::W1) => 0.25,
        (Algorithm::Crlmc, Metric::W2) => 3.0 * p / (9.0 * p + 2.0),
        (Algorithm::Crlmc, Metric::W1) => 0.3,
        (Algorithm::Crklmc, Metric::W2) => 6.0 * p / (15.0 * p + 2.0),
        (Algorithm::Crklmc, Metric::W1) => 0.375,
    }
}

/// Constant inside the logarithm of the iteration count.
pub fn log_constant(algo: Algorithm) -> f64 {
    match algo {
        Algorithm::Crlmc => 3.3,
        Algorithm::Crklmc => 4.8,
        Algorithm::Clmc => 3.0,
        Algorithm::Cklmc => 6.0,
    }
}

pub fn select_parameters(req: &ScheduleRequest) -> Result<SchedulePlan> {
    let mut bad = Vec::new();
    if !(req.epsilon > 0.0 && req.epsilon < 1.0) {
        bad.push(format!("epsilon must lie in (0, 1), got {}", req.epsilon));
    }
    if req.p < 1 {
        bad.push("p must be at least 1".to_string());
    }
    if !(req.m > 0.0 && req.m <= req.big_m && req.big_m.is_finite()) {
        bad.push(format!("need 0 < m <= M, got m={}, M={}", req.m, req.big_m));
    }
    if !(req.m0 >= 0.0 && req.m0.is_finite()) {
        bad.push(format!("M0 must be non-negative, got {}", req.m0));
    }
    if !(req.user_constant > 0.0 && req.user_constant.is_finite()) {
        bad.push(format!("user_constant must be positive, got {}", req.user_constant));
    }
    if !bad.is_empty() {
        return Err(Error::InvalidArgument(bad.join("; ")));
    }
    let h = req.user_constant * req.epsilon.powf(step_exponent(req.algo, req.metric, req.p));
    let lambda = h.powf(lambda_exponent(req.algo, req.metric, req.p));
    let c_n = if req.algo.is_kinetic() { 1.0 } else { 2.0 };
    let n = (c_n / (req.m * h) * (log_constant(req.algo) / req.epsilon).ln()).ceil().max(1.0) as u64;
    let gamma = req
        .algo
        .is_kinetic()
        .then(|| 5.0 * (req.big_m + req.m0 / (2.0 * lambda * lambda)));
    Ok(SchedulePlan { lambda, h, n, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(algo: Algorithm, metric: Metric, eps: f64) -> ScheduleRequest {
        ScheduleRequest {
            algo,
            metric,
            epsilon: eps,
            p: 2,
            m: 1.0,
            big_m: 1.0,
            m0: 1.0,
            user_constant: 1.0,
        }
    }

    #[test]
    fn examples() {
        assert_eq!(lambda_exponent(Algorithm::Clmc, Metric::W1, 2), 0.25);
        let a = select_parameters(&req(Algorithm::Crklmc, Metric::W1, 0.1)).unwrap();
        let b = select_parameters(&req(Algorithm::Crklmc, Metric::W1, 0.05)).unwrap();
        assert!((b.h / a.h - 2f64.powf(-8.0 / 3.0)).abs() < 1e-12);
        assert!((step_exponent(Algorithm::Crlmc, Metric::W2, 2) - 10.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn plan_shape() {
        let plan = select_parameters(&req(Algorithm::Cklmc, Metric::W2, 0.5)).unwrap();
        let g = plan.gamma.unwrap();
        assert!((g - 5.0 * (1.0 + 0.5 / plan.lambda.powi(2))).abs() < 1e-9 * g);
        assert!(plan.n >= 1);
        assert!(select_parameters(&req(Algorithm::Clmc, Metric::W1, 0.5)).unwrap().gamma.is_none());
        assert!(select_parameters(&req(Algorithm::Clmc, Metric::W1, 1.5)).is_err());
        assert!("W3".parse::<Metric>().is_err());
    }
}
