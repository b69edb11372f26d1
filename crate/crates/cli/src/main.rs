//! `torus-stri`: argument parsing and process plumbing around the command
//! bodies in the library crate.
//!
//! Exit codes: 0 ok, 2 validation (bad arguments, malformed files), 3 cap
//! exceeded, 4 numerical failure. Every failure prints a human-readable
//! `error:` line and a machine-parsable `error_code=` line to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use torus_stri_cli::{
    cmd_bins, cmd_decompose, cmd_enumerate, cmd_extremizer_scan, cmd_incidence, cmd_nls,
    cmd_selftest, cmd_strichartz, configure_threads, error_code_name, exit_code, thread_request,
    Backend, HistogramView, Horizon, MethodChoice, NlsConfig, SetSpec, EXIT_VALIDATION,
};
use torus_stri_core::error::{CoreError, Result};
use torus_stri_core::incidence::DEFAULT_RICHNESS_C;

#[derive(Parser)]
#[command(
    name = "torus-stri",
    version,
    about = "Lattice Strichartz functionals, incidence counting, and a cubic NLS window experiment on the 2-torus"
)]
struct Cli {
    /// Worker threads for parallel reductions (default: TORUS_STRI_THREADS, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate weighted parallelograms of a set into a τ-histogram
    Enumerate {
        /// Input set: grid:N, file:PATH, or random:n:seed[:R]
        #[arg(long)]
        set: SetSpec,
        /// One row per exact τ value (default: one summary row)
        #[arg(long, conflicts_with = "dyadic")]
        tau_histogram: bool,
        /// One row per dyadic shell [M, 2M); τ = 0 excluded
        #[arg(long)]
        dyadic: bool,
        /// auto | exhaustive | grid-fast
        #[arg(long, default_value = "auto")]
        backend: Backend,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure the L⁴/L² ratio of the free evolution of one set
    Strichartz {
        /// Input set: grid:N, file:PATH, or random:n:seed[:R]
        #[arg(long)]
        set: SetSpec,
        /// full (2π) | local (1/log #S) | an explicit positive number
        #[arg(long = "T", default_value = "local")]
        t: Horizon,
        /// auto | exact | quadrature
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        /// Fill the seconds column (breaks byte-reproducibility)
        #[arg(long)]
        timing: bool,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full-period ratio scan over centered boxes [−N, N]²
    ExtremizerScan {
        /// Comma-separated box parameters, e.g. 4,8,16,32,64
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<i64>,
        /// Fill the seconds column (breaks byte-reproducibility)
        #[arg(long)]
        timing: bool,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count k-rich lines of a set, or peel it with --decompose
    Incidence {
        /// Input set: grid:N, file:PATH, or random:n:seed[:R]
        #[arg(long)]
        set: SetSpec,
        /// Richness threshold: count lines holding ≥ k set points
        #[arg(long, required_unless_present = "decompose", conflicts_with = "decompose")]
        k: Option<usize>,
        /// Run the exceptional-set peeling instead of line counting
        #[arg(long)]
        decompose: bool,
        /// Richness constant C of the peeling
        #[arg(long, short = 'C', default_value_t = DEFAULT_RICHNESS_C)]
        richness_c: u32,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exceptional-set peeling: per-step norms and halving flags
    Decompose {
        /// Input set: grid:N, file:PATH, or random:n:seed[:R]
        #[arg(long)]
        set: SetSpec,
        /// Richness constant C
        #[arg(long, short = 'C', default_value_t = DEFAULT_RICHNESS_C)]
        richness_c: u32,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bucket the level family's rectangles by level and richness indices
    Bins {
        /// Input set: grid:N, file:PATH, or random:n:seed[:R]
        #[arg(long)]
        set: SetSpec,
        /// Richness constant C of the level family
        #[arg(long, short = 'C', default_value_t = DEFAULT_RICHNESS_C)]
        richness_c: u32,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the logarithmic-window growth experiment from a JSON config
    Nls {
        /// JSON config: {N0, s, delta, sign, dt, windows, K_probe, seed}
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving trajectory.csv and summary.json
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Record a trajectory row every this many steps
        #[arg(long, default_value_t = 100)]
        record_stride: usize,
        /// Also integrate the closed-form plane wave and report its error
        #[arg(long)]
        validate_plane_wave: bool,
    },
    /// Run pinned internal cross-checks
    Selftest,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            CoreError::validation(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = thread_request(cli.threads)? {
        configure_threads(n)?;
    }
    match cli.command {
        Command::Enumerate { set, tau_histogram, dyadic, backend, out } => {
            let view = if tau_histogram {
                HistogramView::PerTau
            } else if dyadic {
                HistogramView::Dyadic
            } else {
                HistogramView::Summary
            };
            emit(out.as_deref(), &cmd_enumerate(&set, view, backend)?)
        }
        Command::Strichartz { set, t, method, timing, out } => {
            emit(out.as_deref(), &cmd_strichartz(&set, t, method, timing)?)
        }
        Command::ExtremizerScan { n, timing, out } => {
            emit(out.as_deref(), &cmd_extremizer_scan(&n, timing)?)
        }
        Command::Incidence { set, k, decompose, richness_c, out } => {
            let csv = if decompose {
                cmd_decompose(&set, richness_c)?
            } else {
                let k = k.expect("clap enforces k unless --decompose");
                cmd_incidence(&set, k)?
            };
            emit(out.as_deref(), &csv)
        }
        Command::Decompose { set, richness_c, out } => {
            emit(out.as_deref(), &cmd_decompose(&set, richness_c)?)
        }
        Command::Bins { set, richness_c, out } => {
            emit(out.as_deref(), &cmd_bins(&set, richness_c)?)
        }
        Command::Nls { config, out_dir, record_stride, validate_plane_wave } => {
            let text = fs::read_to_string(&config).map_err(|e| {
                CoreError::validation(format!("cannot read {}: {e}", config.display()))
            })?;
            let cfg = NlsConfig::from_json(&text)?;
            let run = cmd_nls(&cfg, record_stride, validate_plane_wave)?;
            fs::create_dir_all(&out_dir).map_err(|e| {
                CoreError::validation(format!("cannot create {}: {e}", out_dir.display()))
            })?;
            emit(Some(&out_dir.join("trajectory.csv")), &run.trajectory_csv)?;
            emit(Some(&out_dir.join("summary.json")), &run.summary_json)?;
            print!("{}", run.summary_json);
            Ok(())
        }
        Command::Selftest => {
            print!("{}", cmd_selftest()?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let usage = !matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            if usage {
                eprintln!("error_code=validation");
                return ExitCode::from(EXIT_VALIDATION as u8);
            }
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("error_code={}", error_code_name(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
