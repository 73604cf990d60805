//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {max_asymmetry:e} exceeds {bound:e}")]
    NotSymmetric { max_asymmetry: f64, bound: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigensolver failed to converge (condition estimate {cond_estimate:e})")]
    EigenNoConvergence { cond_estimate: f64 },

    #[error("scalar function domain violation: {0}")]
    ScalarDomain(String),

    #[error(
        "spectral exp_v domain violation: lambda_max = {lambda_max} >= 1/|v| = {bound} (v = {v})"
    )]
    ExpDomain { lambda_max: f64, bound: f64, v: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code the CLI maps this error to. Configuration and precondition
    /// problems are code 2, distinct from inequality violations (code 1).
    pub fn exit_code(&self) -> i32 {
        2
    }
}
