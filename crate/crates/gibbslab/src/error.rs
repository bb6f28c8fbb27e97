use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("evaluation of `{expr}` is not finite")]
    NonFinite { expr: String },
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is reducible: {0}")]
    Reducible(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("condition violated: {0}")]
    Condition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
