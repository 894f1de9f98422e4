use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space parameters: {0}")]
    InvalidParams(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{context}: no convergence (partial value {value}, error estimate {estimate:.3e})")]
    NonConvergence {
        context: String,
        value: Complex64,
        estimate: f64,
    },

    #[error("radial ODE failed at r = {r}: {reason}")]
    Ode { r: f64, reason: String },

    #[error("c-function fit ill-conditioned at s = {s}: {reason}")]
    IllConditioned { s: f64, reason: String },

    #[error("inversion constant failed validation: {0}")]
    Calibration(String),

    #[error("norm diverges: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
