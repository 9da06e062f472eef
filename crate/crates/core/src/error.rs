use thiserror::Error;

use crate::lattice::LatticeVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected rank {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("unsupported denominator: {0}")]
    UnsupportedDenominator(String),

    #[error("algebra context mismatch: {0}")]
    ContextMismatch(String),

    #[error("basis key {key} is not valid in {context}")]
    InvalidKey { key: String, context: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("lattice point {point} lies outside the box of radius {radius}")]
    BoxEscape { point: LatticeVector, radius: i64 },

    #[error("insufficient table coverage: {0}")]
    InsufficientCoverage(String),

    #[error("operation requires a configuration in normal form")]
    NormalFormRequired,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
