use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{0} is not an element of GF(3)")]
    InvalidTrit(u8),

    #[error("length {0} exceeds the supported maximum")]
    TooLong(usize),

    #[error("invalid code length {0}: self-dual codes need a length divisible by 4")]
    InvalidLength(usize),

    #[error("code has dimension zero")]
    ZeroDimension,

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("blocks do not form a {t}-design: points {subset:?} lie in {count} blocks, expected {expected}")]
    NotADesign { t: usize, subset: Vec<usize>, count: u64, expected: u64 },

    #[error("checkpoint {path} was written for a different search (digest {found}, expected {expected})")]
    StaleCheckpoint { path: PathBuf, expected: String, found: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
