pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod potential;
pub mod samplers;
pub mod schedules;

pub use error::{Error, Result};
