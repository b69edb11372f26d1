//! Error → exit-code policy.
//!
//! Exit codes: 0 success, 2 validation (including parse failures), 3 cap
//! exceeded, 4 numerical failure. Alongside the human-readable message the
//! binary prints one machine-parsable `error_code=<name>` line to stderr;
//! `<name>` is one of `validation`, `cap`, `numerical`.

use torus_stri_core::CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Process exit code of an error.
pub fn exit_code(err: &CoreError) -> i32 {
    match err {
        CoreError::Validation(_) | CoreError::Parse { .. } => EXIT_VALIDATION,
        CoreError::CapExceeded { .. } => EXIT_CAP,
        CoreError::Numerical(_) => EXIT_NUMERICAL,
    }
}

/// The `error_code=` token of an error.
pub fn error_code_name(err: &CoreError) -> &'static str {
    match err {
        CoreError::Validation(_) | CoreError::Parse { .. } => "validation",
        CoreError::CapExceeded { .. } => "cap",
        CoreError::Numerical(_) => "numerical",
    }
}
