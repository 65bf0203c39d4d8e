use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed file contents or a size mismatch between header and payload.
    #[error("format error: {0}")]
    Format(String),

    /// A sample or vector outside its representable range.
    #[error("range error: {0}")]
    Range(String),

    /// Degenerate patch, folded mesh or otherwise unusable geometry.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// An invalid configuration value.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    Dimension {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    /// Motion sidecar does not describe the slices it is applied to.
    #[error("sidecar mismatch: {0}")]
    Sidecar(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
