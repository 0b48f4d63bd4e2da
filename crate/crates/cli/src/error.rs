use std::path::PathBuf;

use thiserror::Error;
use weil_core::WeilError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] WeilError),
    #[error("unsupported prime {0}; supported primes are 3, 5, 7, 11 and 13")]
    UnsupportedPrime(u64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse matrix: {0}")]
    Matrix(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
