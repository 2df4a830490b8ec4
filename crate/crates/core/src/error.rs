use thiserror::Error;

/// Errors raised by the simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Cholesky parameters are degenerate (sum of squares {0:e} is at or below 1e-24)")]
    DegenerateParameters(f64),

    #[error("Cholesky parameters must be finite")]
    NonFiniteParameters,

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("angles out of range: theta={theta}, phi={phi}")]
    InvalidAngles { theta: f64, phi: f64 },

    #[error("invalid Poisson mean {0}")]
    InvalidMean(f64),

    #[error("invalid channel parameter {field}: {reason}")]
    InvalidChannel { field: &'static str, reason: String },

    #[error("invalid estimator input: {0}")]
    InvalidEstimatorInput(String),

    #[error("no restart produced a valid reconstruction")]
    NoValidResult,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
