use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-positive squared frequency {value} at tau = {tau}")]
    NonPositiveFrequency { tau: f64, value: f64 },

    #[error("tau = {tau} is outside the tabulated range [{start}, {end}]")]
    OutOfDomain { tau: f64, start: f64, end: f64 },

    #[error("invalid temperature {0} K")]
    InvalidTemperature(f64),

    #[error("degenerate Mathieu protocol: a - 2q = {0} must be positive")]
    DegenerateProtocol(f64),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("integration step failure at tau = {tau}: {reason}")]
    StepFailure { tau: f64, reason: String },

    #[error("solution magnitude exceeded {limit:e} at tau = {tau}")]
    GrowthOverflow { tau: f64, limit: f64 },

    #[error("|f|^2 - |g|^2 - 1 = {residual:e} exceeds the allowed residual")]
    IdentityViolation { residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
