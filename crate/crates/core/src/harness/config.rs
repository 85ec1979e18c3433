use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::{ConvexBody, Halfspace, Penalty, PenaltyKind};
use crate::linalg::SpdMatrix;
use crate::potential::Potential;
use crate::samplers::Algorithm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Polytope {
        halfspaces: Vec<HalfspaceSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outer_radius: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `½ (x - center)ᵀ precision (x - center)`; defaults to the standard Gaussian.
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<Vec<Vec<f64>>>,
    },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Gaussian {
            center: None,
            precision: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PenaltySpec {
    Euclidean,
    Gauge,
    Bregman { q: Vec<Vec<f64>> },
}

/// Either a fixed `λ` or `λ = h^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaRule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

impl LambdaRule {
    pub fn exponent(e: f64) -> Self {
        Self {
            value: None,
            exponent: Some(e),
        }
    }

    pub fn value(v: f64) -> Self {
        Self {
            value: Some(v),
            exponent: None,
        }
    }

    fn resolve(&self, h: f64) -> std::result::Result<f64, String> {
        match (self.value, self.exponent) {
            (Some(v), None) => Ok(v),
            (None, Some(e)) => Ok(h.powf(e)),
            (None, None) => Err("needs either value or exponent".into()),
            (Some(_), Some(_)) => Err("sets both value and exponent".into()),
        }
    }
}

/// Per-algorithm `λ` rules. Missing entries use `h^{1/4}` for the Euler
/// schemes, `h^{3/10}` for the kinetic Euler scheme and `h^{3/8}` for the
/// kinetic midpoint scheme.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaRules {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clmc: Option<LambdaRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cklmc: Option<LambdaRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crlmc: Option<LambdaRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crklmc: Option<LambdaRule>,
}

impl LambdaRules {
    pub fn rule(&self, algo: Algorithm) -> LambdaRule {
        let (set, default) = match algo {
            Algorithm::Clmc => (self.clmc, 0.25),
            Algorithm::Crlmc => (self.crlmc, 0.25),
            Algorithm::Cklmc => (self.cklmc, 0.3),
            Algorithm::Crklmc => (self.crklmc, 0.375),
        };
        set.unwrap_or(LambdaRule::exponent(default))
    }
}

fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn default_inside_scale() -> f64 {
    0.1
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_gamma_factor() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub body: BodySpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    pub penalty: PenaltySpec,
    #[serde(default)]
    pub lambda: LambdaRules,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    pub h: f64,
    /// Step multiplier while the iterate is inside the body; `1` disables it.
    #[serde(default = "default_inside_scale")]
    pub inside_scale: f64,
    /// Iterations per chain.
    pub n: usize,
    /// Number of chains, which is also the ground-truth sample size.
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit_svg: bool,
    /// Fill the `wall_ms` column of metrics.csv (makes it run-dependent).
    #[serde(default)]
    pub record_wall_time: bool,
    /// Kinetic friction is `gamma_factor · M^λ`.
    #[serde(default = "default_gamma_factor")]
    pub gamma_factor: f64,
}

/// A validated configuration with its bodies and constants materialized.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub config: RunConfig,
    pub body: ConvexBody,
    pub potential: Potential,
    pub penalty_kind: PenaltyKind,
    pub lambdas: BTreeMap<Algorithm, f64>,
}

impl ResolvedConfig {
    pub fn penalty(&self, algo: Algorithm) -> crate::Result<Penalty> {
        Penalty::new(self.penalty_kind.clone(), self.lambdas[&algo], &self.body)
    }
}

pub fn parse_config(text: &str, source: &str) -> Result<RunConfig, HarnessError> {
    let looks_json = source.ends_with(".json") || text.trim_start().starts_with('{');
    let parsed = if looks_json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| HarnessError::Parse {
        origin: source.to_string(),
        message,
    })
}

/// Reads, parses and validates a TOML or JSON configuration.
pub fn load_config(path: &Path) -> Result<RunConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let cfg = parse_config(&text, &path.display().to_string())?;
    cfg.resolve()?;
    Ok(cfg)
}

fn matrix(rows: &[Vec<f64>], field: &str, dim: usize, errors: &mut Vec<String>) -> Option<SpdMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        errors.push(format!("{field}: expected a {dim}x{dim} matrix"));
        return None;
    }
    match SpdMatrix::from_rows(rows) {
        Ok(m) => Some(m),
        Err(e) => {
            errors.push(format!("{field}: {e}"));
            None
        }
    }
}

impl RunConfig {
    fn build_body(&self) -> std::result::Result<ConvexBody, String> {
        let made = match &self.body {
            BodySpec::Ball { center, dim, radius } => {
                let center = match (center, dim) {
                    (Some(c), Some(d)) if c.len() != *d => {
                        return Err(format!("body.center has {} entries but body.dim = {d}", c.len()))
                    }
                    (Some(c), _) => c.clone(),
                    (None, Some(d)) => vec![0.0; *d],
                    (None, None) => vec![0.0; 2],
                };
                ConvexBody::ball(center, *radius)
            }
            BodySpec::Box { lower, upper } => ConvexBody::cuboid(lower.clone(), upper.clone()),
            BodySpec::Polytope {
                halfspaces,
                outer_radius,
            } => {
                let hs = halfspaces
                    .iter()
                    .map(|h| Halfspace::new(h.normal.clone(), h.offset))
                    .collect();
                match outer_radius {
                    Some(r) => ConvexBody::polytope_with_outer_radius(hs, *r),
                    None => ConvexBody::polytope(hs),
                }
            }
        };
        made.map_err(|e| format!("body: {e}"))
    }

    /// Checks every field and reports all violations at once.
    pub fn resolve(&self) -> Result<ResolvedConfig, HarnessError> {
        let mut errors = Vec::new();
        if !(self.h.is_finite() && self.h > 0.0) {
            errors.push(format!("h: must be positive, got {}", self.h));
        }
        if !(self.inside_scale.is_finite() && self.inside_scale > 0.0) {
            errors.push(format!("inside_scale: must be positive, got {}", self.inside_scale));
        }
        if self.samples == 0 {
            errors.push("N: must be at least 1".into());
        }
        if self.seeds.is_empty() {
            errors.push("seeds: must not be empty".into());
        }
        if self.algorithms.is_empty() {
            errors.push("algorithms: must not be empty".into());
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            errors.push("algorithms: duplicate entries".into());
        }
        if !(self.gamma_factor.is_finite() && self.gamma_factor > 0.0) {
            errors.push(format!("gamma_factor: must be positive, got {}", self.gamma_factor));
        }
        let mut lambdas = BTreeMap::new();
        for &algo in &self.algorithms {
            match self.lambda.rule(algo).resolve(self.h) {
                Ok(l) if l.is_finite() && l > 0.0 => {
                    lambdas.insert(algo, l);
                }
                Ok(l) => errors.push(format!("lambda.{algo}: resolves to {l}, must be positive")),
                Err(e) => errors.push(format!("lambda.{algo}: {e}")),
            }
        }
        let body = match self.build_body() {
            Ok(b) => Some(b),
            Err(e) => {
                errors.push(e);
                None
            }
        };
        let mut potential = None;
        let mut penalty_kind = None;
        if let Some(body) = &body {
            let dim = body.dim();
            let PotentialSpec::Gaussian { center, precision } = &self.potential;
            let center = center.clone().unwrap_or_else(|| vec![0.0; dim]);
            if center.len() != dim {
                errors.push(format!("potential.center: expected {dim} entries, got {}", center.len()));
            }
            let precision = match precision {
                Some(rows) => matrix(rows, "potential.precision", dim, &mut errors),
                None => Some(SpdMatrix::identity(dim)),
            };
            if let (Some(a), true) = (precision, center.len() == dim) {
                potential = Potential::quadratic(center, a).ok();
            }
            penalty_kind = match &self.penalty {
                PenaltySpec::Euclidean => Some(PenaltyKind::Euclidean),
                PenaltySpec::Gauge => Some(PenaltyKind::Gauge),
                PenaltySpec::Bregman { q } => matrix(q, "penalty.q", dim, &mut errors).map(|q| PenaltyKind::Bregman { q }),
            };
        }
        if !errors.is_empty() {
            return Err(HarnessError::Validation(errors));
        }
        Ok(ResolvedConfig {
            config: self.clone(),
            body: body.expect("checked"),
            potential: potential.expect("checked"),
            penalty_kind: penalty_kind.expect("checked"),
            lambdas,
        })
    }

    /// The planar-ball experiment: standard Gaussian on `B(0, 0.5)` with the
    /// Euclidean penalty, `h = 1e-3`.
    pub fn planar_ball(n: usize, samples: usize, seeds: Vec<u64>) -> Self {
        Self {
            body: BodySpec::Ball {
                center: Some(vec![0.0, 0.0]),
                dim: None,
                radius: 0.5,
            },
            potential: PotentialSpec::default(),
            penalty: PenaltySpec::Euclidean,
            lambda: LambdaRules::default(),
            algorithms: default_algorithms(),
            h: 1e-3,
            inside_scale: default_inside_scale(),
            n,
            samples,
            seeds,
            output_dir: default_output_dir(),
            emit_svg: false,
            record_wall_time: false,
            gamma_factor: default_gamma_factor(),
        }
    }

    /// The planar shifted-triangle experiment with the gauge penalty.
    pub fn planar_simplex(n: usize, samples: usize, seeds: Vec<u64>) -> Self {
        let hs = |normal: [f64; 2], offset| HalfspaceSpec {
            normal: normal.to_vec(),
            offset,
        };
        Self {
            body: BodySpec::Polytope {
                halfspaces: vec![hs([-1.0, 0.0], 0.3), hs([0.0, -1.0], 0.3), hs([1.0, 1.0], 0.6)],
                outer_radius: None,
            },
            penalty: PenaltySpec::Gauge,
            ..Self::planar_ball(n, samples, seeds)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
h = 0.01
n = 10
N = 5

[body]
shape = "ball"
radius = 1.0

[penalty]
kind = "euclidean"
"#;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config(MINIMAL, "min.toml").unwrap();
        assert_eq!(cfg.inside_scale, 0.1);
        assert_eq!(cfg.algorithms, Algorithm::ALL.to_vec());
        assert_eq!(cfg.seeds, vec![0]);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.body.dim(), 2);
        assert!((r.lambdas[&Algorithm::Clmc] - 0.01f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn json_is_equivalent() {
        let cfg = parse_config(MINIMAL, "min.toml").unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&json, "min.json").unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[extra]\nfoo = 1\n");
        assert!(matches!(parse_config(&text, "x.toml"), Err(HarnessError::Parse { .. })));
        let text = MINIMAL.replace("radius = 1.0", "radius = 1.0\ncolour = 3");
        assert!(matches!(parse_config(&text, "x.toml"), Err(HarnessError::Parse { .. })));
    }

    #[test]
    fn all_violations_are_listed() {
        let text = MINIMAL.replace("h = 0.01", "h = -0.01").replace("N = 5", "N = 0");
        let err = parse_config(&text, "x.toml").unwrap().resolve().unwrap_err();
        match err {
            HarnessError::Validation(v) => {
                assert!(v.iter().any(|m| m.starts_with("h:")));
                assert!(v.iter().any(|m| m.starts_with("N:")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planar_lambda_rules() {
        let r = RunConfig::planar_ball(1, 1, vec![0]).resolve().unwrap();
        let got: Vec<f64> = Algorithm::ALL.iter().map(|a| r.lambdas[a]).collect();
        // clmc, cklmc, crlmc, crklmc
        let want = [0.1778, 0.1259, 0.1778, 0.0750];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 5e-5, "{got:?}");
        }
    }
}
