use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid absorber layout: {0}")]
    InvalidAbsorber(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    /// A field became NaN or infinite.
    #[error("numerical instability detected at step {step}")]
    Instability { step: u64 },

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
