use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the supported domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A root was not bracketed inside the scan window.
    #[error("root search failed: {what} (scanned up to {window})")]
    SearchFailure { what: String, window: f64 },

    /// An iterative method hit its iteration cap.
    #[error("no convergence in {what} after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// Two inputs that must agree do not (grids, shells, dimensions).
    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    /// A geometric construction is invalid or degenerate.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The requested feature is not supported for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A configuration or text file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
