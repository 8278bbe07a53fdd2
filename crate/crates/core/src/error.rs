use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid noise variance: {0}")]
    InvalidNoise(String),

    #[error("pilot too short: phi = {phi} < n = {n}")]
    PilotTooShort { n: usize, phi: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite SNR: {0}")]
    NonFiniteSnr(String),

    #[error("DoF formula requires n_A >= n_B (got n_A = {n_a}, n_B = {n_b})")]
    OrderingViolation { n_a: usize, n_b: usize },

    #[error("power grid rejected: {0}")]
    GridTooSmall(String),

    #[error("integrand failed at trial {trial}: {source}")]
    IntegrandFailure {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix of order {size} exceeds the guard limit {limit}")]
    DimensionGuard { size: usize, limit: usize },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 parse, 3 validation, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 2,
            Error::InvalidNoise(_)
            | Error::PilotTooShort { .. }
            | Error::InvalidConfig(_)
            | Error::OrderingViolation { .. }
            | Error::GridTooSmall(_)
            | Error::Validation(_)
            | Error::Usage(_) => 3,
            Error::NotHermitian { .. }
            | Error::NotPositiveDefinite
            | Error::DimensionMismatch(_)
            | Error::ShapeMismatch(_)
            | Error::NonFiniteSnr(_)
            | Error::IntegrandFailure { .. }
            | Error::DimensionGuard { .. }
            | Error::QuadratureFailure(_) => 4,
        }
    }
}
