use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("sector not supported: {0}")]
    UnsupportedSector(String),

    #[error("configuration is not part of the basis")]
    ConfigurationNotInBasis,

    #[error("momentum k = {k} is outside the allowed domain: {reason}")]
    MomentumDomain { k: f64, reason: &'static str },

    #[error("dense extraction refused for dimension {dim} (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("no {branch} bound state found: {reason}")]
    BranchNotFound { branch: String, reason: String },

    #[error("propagation failed to converge at step {step}: residual {residual:e} > tolerance {tol:e}")]
    NonConvergence { step: usize, residual: f64, tol: f64 },

    #[error("linear solve failed: {0}")]
    Singular(&'static str),

    #[error("invalid scattering setup: {0}")]
    InvalidSetup(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
