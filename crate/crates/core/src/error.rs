use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration file could not be parsed or failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// A simulation produced data that cannot be analysed (empty tails, zero reference rate, ...).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
