use thiserror::Error;

/// Errors produced by the geometry, sampling and metric layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("non-finite state at step {step} (|theta| = {norm:e}); step size may be too large for the penalty")]
    NonFinite { step: usize, norm: f64 },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("degenerate density: total mass {0:e}")]
    DegenerateDensity(f64),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
