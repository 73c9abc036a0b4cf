use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed corpus input; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("value out of range: {0}")]
    Range(String),
    #[error("parameter outside the model domain: {0}")]
    Domain(String),
    #[error("insufficient data: need at least {needed} usable points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("trial {index}: {source}")]
    Trial { index: usize, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
