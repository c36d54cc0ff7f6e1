//! Error type shared by every module of the crate.

use thiserror::Error;

/// Unified error type. The CLI maps these onto exit codes: configuration and
/// domain errors are usage problems (exit 2), everything numeric is exit 3.
#[derive(Debug, Error)]
pub enum FreudError {
    /// Invalid configuration (precision too low, empty grid, bad flag value).
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index beyond the range covered by a coefficient table.
    #[error("table exhausted: index {requested} exceeds n_max {n_max}")]
    TableExhausted { requested: usize, n_max: usize },

    /// The Newton solver for the string equation did not converge.
    #[error("solver failure after {iterations} iterations (scaled residual {residual:.3e})")]
    SolverFailure { iterations: usize, residual: f64 },

    /// An independent oracle disagreed with itself under refinement.
    #[error("oracle error: {0}")]
    Oracle(String),

    /// Root bracketing could not isolate the expected number of sign changes.
    #[error("bracketing failure: {0}")]
    Bracketing(String),

    /// The ladder linear system is singular (Λ vanishes identically).
    #[error("degenerate ladder system: {0}")]
    Degenerate(String),

    /// Any other numeric failure (eigen solver breakdown, unexpected regime).
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed cache or reference data file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FreudError>;
