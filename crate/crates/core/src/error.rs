use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Fock space: {0}")]
    InvalidSpace(String),

    #[error("mode index {mode} out of range for a {modes}-mode space")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("occupation {occupation:?} exceeds cutoffs {cutoffs:?}")]
    OccupationOutOfRange {
        occupation: Vec<usize>,
        cutoffs: Vec<usize>,
    },

    #[error("operands live on different Fock spaces ({left:?} vs {right:?})")]
    SpaceMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("trace drifted by {drift:.3e} at t = {time:.6e} s (step {step})")]
    TraceDrift { drift: f64, time: f64, step: usize },

    #[error("non-finite value in state at t = {time:.6e} s (step {step})")]
    NonFinite { time: f64, step: usize },

    #[error("state invariant violated at t = {time:.6e} s: {detail}")]
    InvalidState { time: f64, detail: String },

    #[error("scenario `{scenario}` failed to converge: {detail}")]
    Convergence { scenario: String, detail: String },

    #[error("quadrature did not converge on [{lower:e}, {upper:e}]: estimated error {error:e}")]
    Quadrature { lower: f64, upper: f64, error: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

/// Fails unless `value` is finite and strictly positive.
pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

/// Fails unless `value` is finite and nonnegative.
pub(crate) fn require_nonnegative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}

pub(crate) fn require_unit_interval(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in [0, 1], got {value}")))
    }
}
