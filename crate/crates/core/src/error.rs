use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// The selected eigenvalue block contains a repeated eigenvalue.
    #[error("eigenvalues at columns {indices:?} are not separated by more than the tolerance")]
    NotSimple { indices: Vec<usize> },

    #[error("inputs retain different numbers of eigenvectors ({a} vs {b})")]
    KMismatch { a: usize, b: usize },

    #[error("eigensolver did not converge (off-diagonal norm {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("failed precondition: {0}")]
    FailedPrecondition(String),

    #[error("input size {n} exceeds the search cap of {cap}")]
    ResourceLimit { n: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
