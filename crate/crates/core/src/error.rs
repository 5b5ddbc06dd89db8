use thiserror::Error;

/// Errors produced by the gasket toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested size exceeds a documented implementation cap.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A linear system has no unique solution.
    #[error("singular system: {0}")]
    Singular(String),
    /// Too few samples for a statistical estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// Malformed external input (CSV, JSON, bit strings).
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
