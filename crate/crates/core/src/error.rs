use thiserror::Error;

/// Errors produced by the library layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index {index} out of bounds for order {order}")]
    IndexOutOfBounds { index: usize, order: usize },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("order {order} exceeds supported bound {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("missing value for variable {0}")]
    MissingVariable(String),

    #[error("class {0} is not supported by this operation")]
    UnsupportedClass(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown format: {0}")]
    UnknownFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
