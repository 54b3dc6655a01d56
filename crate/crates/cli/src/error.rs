use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("claim {name:?}: {message}")]
    Claim { name: String, message: String },
    #[error("unknown asset {0:?}")]
    UnknownAsset(String),
    #[error("unknown claim {0:?}")]
    UnknownClaim(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("{0}")]
    Core(#[from] rwval_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
