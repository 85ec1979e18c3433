//! Configuration, experiment orchestration and file outputs.

pub mod config;
pub mod experiment;
pub mod output;
pub mod rates;

pub use config::{load_config, parse_config, BodySpec, LambdaRule, LambdaRules, PenaltySpec, PotentialSpec, ResolvedConfig, RunConfig};
pub use experiment::{run_experiment, ExperimentReport, RunFailure, RunRecord};
pub use output::{metrics_csv, read_samples_csv, samples_csv, scatter_svg, write_outputs, METRICS_HEADER};
pub use rates::{default_lambdas, gaussian_ball_study, RateStudy};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Run(#[from] crate::Error),
}

impl HarnessError {
    /// Process exit code: 1 for configuration problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } | HarnessError::Validation(_) => 1,
            HarnessError::Io(_) | HarnessError::Run(_) => 2,
        }
    }
}
