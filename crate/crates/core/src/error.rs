use thiserror::Error;

/// Errors raised by instance validation, basis construction and the engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("allocation {0} is not a member of the basis")]
    NotInBasis(String),

    #[error("greedy fill stopped with unmet demand (rows {rows:?}, columns {cols:?})")]
    InfeasibleFill { rows: Vec<usize>, cols: Vec<usize> },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("invalid instance field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
