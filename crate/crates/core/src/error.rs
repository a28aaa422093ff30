use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A potential violates its invariants or is unsuitable for the operation.
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// A weight literal or table is malformed.
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    /// A solver parameter is out of range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The eigenvalue bracket did not enclose the requested root.
    #[error("eigenvalue bracket failure for n = {n}: phase offsets {lo_offset} at {lo}, {hi_offset} at {hi}")]
    Bracket {
        n: usize,
        lo: f64,
        hi: f64,
        lo_offset: f64,
        hi_offset: f64,
    },

    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
