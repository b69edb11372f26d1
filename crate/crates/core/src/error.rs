//! Error type shared by all modules.

use thiserror::Error;

/// Failure modes of the library.
///
/// The CLI maps these onto process exit codes: validation and parse errors
/// are exit 2, cap violations exit 3, numerical failures exit 4.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A precondition on the inputs was violated.
    #[error("validation: {0}")]
    Validation(String),

    /// An enumeration or size cap was exceeded; the operation refuses to run
    /// rather than silently taking unbounded time or memory.
    #[error("cap exceeded: {what} limited to {limit}, got {got}")]
    CapExceeded {
        what: &'static str,
        limit: u64,
        got: u64,
    },

    /// Malformed textual input, with the 1-based line it occurred on.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A computation produced non-finite values or failed an internal
    /// cross-check.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CoreError::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CoreError::Numerical(msg.into())
    }
}
