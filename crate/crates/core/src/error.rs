use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operator is singular to tolerance (condition estimate {cond:.3e})")]
    SingularOperator { cond: f64 },

    #[error("datum lies outside the range of the operator (relative residual {residual:.3e})")]
    NoSolution { residual: f64 },

    #[error("not a Friedrichs operator: {reason}")]
    NotFriedrichs { reason: String, point: Option<usize> },

    #[error("negative curvature {curvature:.3e} encountered; operator is not positive")]
    NotPositive { curvature: f64 },

    #[error("compressed problem singular at n = {n} (smallest singular value {sigma_min:.3e})")]
    TruncationSingular { n: usize, sigma_min: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidInput(msg.into()))
}
