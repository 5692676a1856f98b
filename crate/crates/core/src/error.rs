use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested tolerance. `estimate` is the best value obtained.
    #[error("tolerance {tol:e} not reached: estimate {estimate} with error estimate {error_estimate:e}")]
    Accuracy { estimate: f64, error_estimate: f64, tol: f64 },

    #[error("cannot parse vector spec `{spec}`: {reason}")]
    VectorSpec { spec: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
