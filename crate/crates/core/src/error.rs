use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by kernel construction, spectral routines and estimators.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: shape mismatches, non-finite entries, invalid parameters.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// `σ⟨s, a⟩` exceeded the representable exponent range.
    #[error("kernel overflow at pair ({row}, {col}): exponent {exponent} exceeds {limit}")]
    Overflow {
        row: usize,
        col: usize,
        exponent: f64,
        limit: f64,
    },

    /// A matrix with no usable spectrum (zero trace, rank zero).
    #[error("degenerate matrix: {0}")]
    Degenerate(String),

    /// Input violates an estimator precondition, e.g. a Gram matrix that is not unit trace.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Order too close to 1 for the generic estimators.
    #[error("alpha = {0} is within 1e-6 of 1; use the Umegaki limit estimator instead")]
    AlphaNearOne(f64),

    /// Eigensolver failure or a trace argument that became non-positive after clamping.
    #[error("numerical failure: {message} (clamped eigenvalues: {clamp_count})")]
    Numerical { message: String, clamp_count: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
