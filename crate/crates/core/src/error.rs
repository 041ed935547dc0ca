use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("weight is not finite and positive at {point:?} (value {value})")]
    WeightNotPositive { point: Vec<f64>, value: f64 },

    #[error("exponent relation violated: {0}")]
    ExponentRelation(String),

    #[error("weight condition `{kind}` violated: worst ratio {ratio:e} at {witness:?}")]
    WeightCondition {
        kind: String,
        ratio: f64,
        witness: Vec<f64>,
    },

    #[error("frame condition fails: condition number {condition:e}")]
    FrameCondition { condition: f64 },

    #[error("system has no dual window")]
    MissingDual,

    #[error("iterative solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
