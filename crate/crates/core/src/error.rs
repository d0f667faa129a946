use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("fractional exponent {0} outside [0, 1]")]
    ExponentOutOfRange(f64),

    #[error("position {0} outside [0, 1]")]
    PositionOutOfRange(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("insufficient data: need at least {needed} coefficients, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("mode {0} has a vanishing eigenvalue")]
    SingularMode(usize),

    #[error("stability margin violated: {0}")]
    Margin(String),

    #[error("input operator regularity exponent {0} must be below 1")]
    Regularity(f64),

    #[error("Picard window of length {window} has contraction bound {factor} > 1/2")]
    StepSize { window: f64, factor: f64 },

    #[error("Picard iteration did not converge after {iterations} iterations (residual {residual:e})")]
    PicardNonConvergence { iterations: usize, residual: f64 },

    #[error("funnel violated at t = {t}: phi*|e| = {scaled_error}")]
    FunnelViolation { t: f64, scaled_error: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("integrator exceeded {0} steps")]
    MaxSteps(usize),

    #[error("step size {h:e} fell below the minimum at t = {t}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
