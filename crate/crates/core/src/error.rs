//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown catalog map `{0}`")]
    UnknownMap(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("degenerate immersion: {0}")]
    DegenerateImmersion(String),

    #[error("precondition failed: {what} (defect {defect:.3e})")]
    Precondition { what: String, defect: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("frame alignment failed: {0}")]
    Frame(String),

    #[error("degenerate flow direction: |xi^T Du| = {0:.3e}")]
    DegenerateDirection(f64),

    #[error("step error: {0}")]
    Step(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;
