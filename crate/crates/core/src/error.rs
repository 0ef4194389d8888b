use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A user-facing input violates a documented invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("degenerate result: {0}")]
    Degenerate(String),

    #[error("singular acoustic tensor at frequency ({0}, {1})")]
    SingularAcoustic(usize, usize),

    #[error("solver produced a non-finite value after {iterations} iterations")]
    NonFinite { iterations: usize },

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("{path}: row {row}: {message}")]
    Row {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{0}")]
    Format(String),

    #[error("too many failed samples: {failed} of {total}")]
    TooManyFailures { failed: usize, total: usize },

    #[error("no onset of auxeticity in the tabulated range")]
    NoOnset,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// An I/O error with the offending path in its message.
    pub(crate) fn io_at(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
