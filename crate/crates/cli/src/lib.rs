//! Command-line harness over the torus Strichartz / incidence / NLS
//! library: set specifiers, subcommand bodies, and the exit-code policy.
//!
//! The binary (`torus-stri`) is a thin argument-parsing shell; everything
//! observable — CSV text, summary JSON, error classification — lives here
//! so tests can drive it in-process. Outputs are deterministic: identical
//! arguments and seeds produce identical bytes regardless of the worker
//! thread count (parallel reductions in the core combine partial sums in
//! index order). Wall-clock timing columns are opt-in (`--timing`) and stay
//! `0` otherwise, keeping default output byte-reproducible.

pub mod commands;
pub mod exit;
pub mod set_spec;

pub use commands::{
    cmd_bins, cmd_decompose, cmd_enumerate, cmd_extremizer_scan, cmd_incidence, cmd_nls,
    cmd_selftest, cmd_strichartz, plane_wave_error, strichartz_csv, strichartz_report, Backend,
    HistogramView, Horizon, MethodChoice, NlsConfig, NlsRun, SignChoice,
};
pub use exit::{error_code_name, exit_code, EXIT_CAP, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};
pub use set_spec::{SetSpec, DEFAULT_RANDOM_RADIUS};

use torus_stri_core::error::{CoreError, Result};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "TORUS_STRI_THREADS";

/// Resolves the worker thread count: explicit flag, else the environment
/// variable, else `None` (library default). Zero or garbage is rejected.
pub fn thread_request(flag: Option<usize>) -> Result<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(raw) => Some(raw.parse::<usize>().map_err(|e| {
                CoreError::validation(format!("bad {THREADS_ENV} value `{raw}`: {e}"))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CoreError::validation("thread count must be at least 1"));
    }
    Ok(n)
}

/// Installs the global rayon pool with `n` workers. Call once, before any
/// parallel work; later calls fail.
pub fn configure_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CoreError::validation(format!("cannot configure thread pool: {e}")))
}
