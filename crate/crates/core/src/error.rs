use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("field has nonzero x-mean (max |c(0,ky)| = {residual:e}); ∂ₓ⁻¹ is undefined")]
    NonzeroXMean { residual: f64 },

    #[error("non-finite coefficients after step {step}")]
    NonFinite { step: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("resolution: {0}")]
    Resolution(String),

    #[error("empty sample set: {0}")]
    EmptySample(String),

    #[error("config: {0}")]
    Config(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
