use thiserror::Error;

/// Errors raised by the foundation types and raster I/O.
#[derive(Debug, Error)]
pub enum CoreError {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver failed to converge or left its valid interval.
    #[error("solver error: {0}")]
    Solver(String),

    /// A raster or sidecar file did not match the expected format.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image codec error: {0}")]
    Codec(#[from] image::ImageError),
}

impl CoreError {
    pub fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        CoreError::Solver(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        CoreError::Format(msg.into())
    }
}
