use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty request: {0}")]
    EmptyRequest(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite likelihood at data index {index}")]
    NonFinite { index: usize },

    #[error("insufficient draws: need at least {need}, got {got}")]
    InsufficientSample { need: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: key `{key}`: {msg}")]
    ConfigKey {
        line: usize,
        key: String,
        msg: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
