//! Subcommand bodies, kept binary-free so they can be exercised as a
//! library.
//!
//! Every command takes already-parsed arguments and returns the text it
//! would print — CSV with a header row, `,` separator, floats at 17
//! significant digits so values round-trip losslessly. Nothing here touches
//! the process environment or exit codes; the binary layer owns those.

use std::time::Instant;

use serde::Deserialize;

use torus_stri_core::error::{CoreError, Result};
use torus_stri_core::incidence::{
    bins_csv, decompose, rectangle_bins, rich_line_ratio, rich_lines, rich_lines_csv,
    LINE_COLLECTION_CAP, RECTANGLE_BIN_CAP,
};
use torus_stri_core::levels::DyadicLevels;
use torus_stri_core::nls::{window_growth_experiment, NLSField, Sign};
use torus_stri_core::numeric::{fmt_float, log_clamped, NeumaierSum};
use torus_stri_core::propagator::{
    auto_panels, extremizer_scan, l4_quadrature, scan_csv, strichartz_ratio, RatioMethod,
    StrichartzReport,
};
use torus_stri_core::quadruple::{
    additive_energy, l4_time_integral, tau_histogram_box, LatticeBox, TauHistogram,
    DEFAULT_ENUMERATION_CAP,
};
use torus_stri_core::sampling::random_spectrum;
use torus_stri_core::{Amplitude, FreqPoint, Spectrum, WeightedSupport};

use crate::set_spec::SetSpec;

/// Support-size cap for the peeling decomposition (its per-step cost is
/// quadratic in the support).
pub const DECOMPOSE_CAP: usize = 4096;

/// Modes drawn for seeded NLS initial data (fewer if the band is smaller).
pub const NLS_DATA_MODES: usize = 64;

// ---- enumerate -----------------------------------------------------------

/// Which parallelogram-enumeration backend to use.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Closed-form counting for `grid:` sets, exhaustive otherwise.
    Auto,
    /// Always the cubic scan over the support.
    Exhaustive,
    /// Closed-form counting; errors on non-grid sets.
    GridFast,
}

impl std::str::FromStr for Backend {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "exhaustive" => Ok(Backend::Exhaustive),
            "grid-fast" => Ok(Backend::GridFast),
            other => Err(CoreError::validation(format!(
                "unknown backend `{other}` (expected auto, exhaustive, or grid-fast)"
            ))),
        }
    }
}

/// How to render the τ-histogram of a set.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum HistogramView {
    /// One `n,parallelograms,rectangles,weighted_total` summary row.
    Summary,
    /// One row per exact τ value.
    PerTau,
    /// One row per dyadic shell `[M, 2M)`; τ = 0 is excluded.
    Dyadic,
}

/// Builds the τ-histogram of the set and renders it per `view`.
pub fn cmd_enumerate(spec: &SetSpec, view: HistogramView, backend: Backend) -> Result<String> {
    let f = spec.load()?;
    let hist: TauHistogram<f64> = match (backend, spec) {
        (Backend::GridFast | Backend::Auto, SetSpec::Grid(n)) => {
            tau_histogram_box(&LatticeBox::centered(*n)?)?
        }
        (Backend::GridFast, _) => {
            return Err(CoreError::validation(
                "the grid-fast backend only handles grid: sets",
            ));
        }
        _ => TauHistogram::from_weighted(
            &WeightedSupport::from_spectrum(&f)?,
            DEFAULT_ENUMERATION_CAP,
        )?,
    };
    Ok(match view {
        HistogramView::PerTau => hist.to_csv(),
        HistogramView::Dyadic => hist.dyadic_csv(),
        HistogramView::Summary => {
            let mut weighted = NeumaierSum::new();
            for (_, bin) in hist.iter() {
                weighted.add(bin.weighted_sum);
            }
            format!(
                "n,parallelograms,rectangles,weighted_total\n{},{},{},{}\n",
                f.support_size(),
                hist.total_count(),
                hist.rectangle_count(),
                fmt_float(weighted.value())
            )
        }
    })
}

// ---- strichartz ----------------------------------------------------------

/// The time horizon of a ratio measurement.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Horizon {
    /// `T = 2π`, the full period.
    Full,
    /// `T = 1/log #S` under the clamped logarithm.
    Local,
    /// An explicit positive horizon.
    Value(f64),
}

impl std::str::FromStr for Horizon {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Horizon::Full),
            "local" => Ok(Horizon::Local),
            other => {
                let v: f64 = other.parse().map_err(|e| {
                    CoreError::validation(format!(
                        "horizon must be `full`, `local`, or a number, got `{other}`: {e}"
                    ))
                })?;
                Ok(Horizon::Value(v))
            }
        }
    }
}

impl Horizon {
    pub fn resolve(self, support_size: usize) -> f64 {
        match self {
            Horizon::Full => std::f64::consts::TAU,
            Horizon::Local => 1.0 / log_clamped(support_size as f64),
            Horizon::Value(v) => v,
        }
    }
}

/// How `strichartz` computes the quartic integral.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    /// Exact σ-sum for small nonnegative spectra, quadrature otherwise.
    Auto,
    /// Force the exact σ-sum (nonnegative real amplitudes only).
    Exact,
    /// Force composite Gauss–Legendre quadrature.
    Quadrature,
}

impl std::str::FromStr for MethodChoice {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "exact" => Ok(MethodChoice::Exact),
            "quadrature" => Ok(MethodChoice::Quadrature),
            other => Err(CoreError::validation(format!(
                "unknown method `{other}` (expected auto, exact, or quadrature)"
            ))),
        }
    }
}

/// Ratio measurement with an explicit method choice.
pub fn strichartz_report(
    f: &Spectrum,
    t_max: f64,
    method: MethodChoice,
) -> Result<StrichartzReport<f64>> {
    if f.is_empty() {
        return Err(CoreError::validation("empty spectrum"));
    }
    let (quartic, used) = match method {
        MethodChoice::Auto => return strichartz_ratio(f, Some(t_max)),
        MethodChoice::Exact => (l4_time_integral(f, t_max)?, RatioMethod::ExactSigma),
        MethodChoice::Quadrature => (
            l4_quadrature(f, t_max, auto_panels(f, t_max))?,
            RatioMethod::Quadrature,
        ),
    };
    let l4_norm = quartic.max(0.0).powf(0.25);
    let l2_norm = f.l2_function_norm();
    Ok(StrichartzReport {
        support_size: f.support_size(),
        t_max,
        l4_norm,
        l2_norm,
        ratio: l4_norm / l2_norm,
        method: used,
    })
}

/// One scan-format CSV row for a report; the `N` column carries the support
/// size and the log column divides by `log #S`.
pub fn strichartz_csv(r: &StrichartzReport<f64>, seconds: f64) -> String {
    format!(
        "N,T,l4,l2,ratio,ratio4_over_logN,method,seconds\n{},{},{},{},{},{},{},{}\n",
        r.support_size,
        fmt_float(r.t_max),
        fmt_float(r.l4_norm),
        fmt_float(r.l2_norm),
        fmt_float(r.ratio),
        fmt_float(r.ratio.powi(4) / log_clamped(r.support_size as f64)),
        r.method,
        fmt_float(seconds)
    )
}

/// `strichartz` body: measure the ratio of one set at one horizon.
pub fn cmd_strichartz(
    spec: &SetSpec,
    horizon: Horizon,
    method: MethodChoice,
    timing: bool,
) -> Result<String> {
    let f = spec.load()?;
    let t = horizon.resolve(f.support_size());
    let started = Instant::now();
    let report = strichartz_report(&f, t, method)?;
    let seconds = if timing { started.elapsed().as_secs_f64() } else { 0.0 };
    Ok(strichartz_csv(&report, seconds))
}

// ---- extremizer-scan -----------------------------------------------------

/// Full-period ratio scan over centered boxes `[−N, N]²`.
pub fn cmd_extremizer_scan(n_list: &[i64], timing: bool) -> Result<String> {
    if n_list.is_empty() {
        return Err(CoreError::validation("extremizer scan needs at least one N"));
    }
    let rows = if timing {
        let mut rows = Vec::with_capacity(n_list.len());
        for &n in n_list {
            let started = Instant::now();
            let mut row = extremizer_scan::<f64>(&[n])?.pop().expect("one row per N");
            row.seconds = started.elapsed().as_secs_f64();
            rows.push(row);
        }
        rows
    } else {
        extremizer_scan::<f64>(n_list)?
    };
    Ok(scan_csv(&rows))
}

// ---- incidence / decompose / bins ----------------------------------------

/// Rich-line count of one set at one threshold.
pub fn cmd_incidence(spec: &SetSpec, k: usize) -> Result<String> {
    let set = spec.point_set()?;
    let n = set.len();
    let m = rich_lines(&set, k, LINE_COLLECTION_CAP)?.len();
    Ok(rich_lines_csv(&[(
        n as u64,
        k as u64,
        m as u64,
        rich_line_ratio(n, k, m),
    )]))
}

/// Iterated exceptional-set peeling of a nonnegative spectrum.
pub fn cmd_decompose(spec: &SetSpec, c: u32) -> Result<String> {
    let f = spec.load()?;
    let trace = decompose(&f, c, DECOMPOSE_CAP)?;
    Ok(trace.to_csv())
}

/// Rectangle buckets of the dyadic level family, keyed by `(j⃗, a⃗)`.
pub fn cmd_bins(spec: &SetSpec, c: u32) -> Result<String> {
    let f = spec.load()?;
    let levels = DyadicLevels::build(&f, c)?;
    let bins = rectangle_bins(&levels, RECTANGLE_BIN_CAP)?;
    Ok(bins_csv(&bins))
}

// ---- nls -----------------------------------------------------------------

/// JSON run configuration of the window-growth experiment.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlsConfig {
    /// Initial-data band limit; must be a positive power of two.
    #[serde(rename = "N0")]
    pub n0: i64,
    /// Sobolev index tracked across windows, in `(0, 1]`.
    pub s: f64,
    /// Initial `L²(T²)` norm; `0` runs the zero field.
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub sign: SignChoice,
    /// Upper bound on the time step; windows use uniform steps `≤ dt`.
    pub dt: f64,
    pub windows: usize,
    /// Ladder ratio `N_j = K_probe^j · N0`.
    #[serde(rename = "K_probe", default = "default_k_probe")]
    pub k_probe: i64,
    #[serde(default)]
    pub seed: u64,
}

fn default_delta() -> f64 {
    0.05
}

fn default_k_probe() -> i64 {
    2
}

/// The nonlinearity sign as it appears in config files.
#[derive(Copy, Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SignChoice {
    Defocusing,
    Focusing,
}

impl From<SignChoice> for Sign {
    fn from(c: SignChoice) -> Sign {
        match c {
            SignChoice::Defocusing => Sign::Defocusing,
            SignChoice::Focusing => Sign::Focusing,
        }
    }
}

impl NlsConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| CoreError::validation(format!("bad NLS config: {e}")))
    }

    /// Seeded initial data: `min(64, band area)` modes in `[−N0, N0]²` with
    /// complex amplitudes, later rescaled to `‖u₀‖ = delta` by the
    /// experiment. `delta = 0` short-circuits to the zero field.
    pub fn initial_data(&self) -> Result<Spectrum> {
        if self.delta == 0.0 {
            return Ok(Spectrum::new());
        }
        if self.n0 <= 0 {
            return Err(CoreError::validation(format!(
                "band limit must be positive, got {}",
                self.n0
            )));
        }
        let area = (2 * self.n0 + 1).pow(2) as usize;
        random_spectrum(self.seed, NLS_DATA_MODES.min(area), self.n0)
    }
}

/// Both artifacts of one `nls` run.
#[derive(Clone, Debug)]
pub struct NlsRun {
    /// `t,mass,hamiltonian,hs_norm,window_index,growth_factor` rows.
    pub trajectory_csv: String,
    /// Run summary: `k_obs`, drifts, window lengths and factors.
    pub summary_json: String,
}

/// Runs the window-growth experiment described by `cfg`.
pub fn cmd_nls(cfg: &NlsConfig, record_stride: usize, validate_plane_wave: bool) -> Result<NlsRun> {
    let data = cfg.initial_data()?;
    let report = window_growth_experiment(
        &data,
        cfg.n0,
        cfg.sign.into(),
        cfg.s,
        cfg.delta,
        cfg.dt,
        cfg.windows,
        cfg.k_probe,
        record_stride,
    )?;

    let rows = &report.rows;
    let (m0, h0) = (rows[0].mass, rows[0].hamiltonian);
    let mass_dev = rows.iter().map(|r| (r.mass - m0).abs()).fold(0.0, f64::max);
    let ham_dev = rows
        .iter()
        .map(|r| (r.hamiltonian - h0).abs())
        .fold(0.0, f64::max);
    let rel = |dev: f64, base: f64| if base == 0.0 { 0.0 } else { dev / base };
    let plane_wave_err = if validate_plane_wave {
        Some(plane_wave_error(cfg.sign.into())?)
    } else {
        None
    };

    let summary = serde_json::json!({
        "k_obs": report.k_obs,
        "total_time": report.total_time,
        "windows": cfg.windows,
        "window_lengths": report.window_lengths,
        "growth_factors": report.factors,
        "mass_initial": m0,
        "mass_final": rows[rows.len() - 1].mass,
        "mass_drift_rel": rel(mass_dev, m0),
        "hamiltonian_initial": h0,
        "hamiltonian_final": rows[rows.len() - 1].hamiltonian,
        "hamiltonian_drift_rel": rel(ham_dev, h0.abs()),
        "plane_wave_error": plane_wave_err,
    });
    let mut summary_json =
        serde_json::to_string_pretty(&summary).expect("summary serializes");
    summary_json.push('\n');
    Ok(NlsRun {
        trajectory_csv: report.to_csv(),
        summary_json,
    })
}

/// Maximum node error after integrating the plane wave `½·e^{i(2x−y)}` to
/// `T = 1` at `dt = 1e−3`, against the closed-form solution
/// `A e^{i(ξ·x − (|ξ|² ± A²)t)}`.
pub fn plane_wave_error(sign: Sign) -> Result<f64> {
    let xi = FreqPoint::new(2, -1)?;
    let amp = 0.5;
    let mut f = Spectrum::new();
    f.set_real(xi, amp);
    let mut state = NLSField::from_spectrum(&f, 4, sign)?;
    for _ in 0..1000 {
        state.strang_step(1e-3)?;
    }
    let t = state.time();
    let omega = xi.norm_sq() as f64 + sign.factor::<f64>() * amp * amp;
    let n = state.n_x();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let x = std::f64::consts::TAU * i as f64 / n as f64;
            let y = std::f64::consts::TAU * j as f64 / n as f64;
            let phase = xi.x as f64 * x + xi.y as f64 * y - omega * t;
            let exact = Amplitude::new(amp * phase.cos(), amp * phase.sin());
            worst = worst.max((state.samples()[i * n + j] - exact).norm());
        }
    }
    Ok(worst)
}

// ---- selftest --------------------------------------------------------------

fn check(out: &mut String, name: &str, ok: bool, detail: String) -> Result<()> {
    if ok {
        out.push_str(&format!("ok — {name} ({detail})\n"));
        Ok(())
    } else {
        Err(CoreError::numerical(format!("selftest `{name}` failed: {detail}")))
    }
}

fn literal_points(coords: &[(i64, i64)]) -> Result<torus_stri_core::PointSet> {
    Ok(torus_stri_core::PointSet::new(
        coords
            .iter()
            .map(|&(x, y)| FreqPoint::new(x, y))
            .collect::<Result<Vec<_>>>()?,
    ))
}

/// Pinned end-to-end cross-checks; any mismatch is a numerical error.
pub fn cmd_selftest() -> Result<String> {
    let mut out = String::new();

    let grid2 = literal_points(&[(0, 0), (0, 1), (1, 0), (1, 1)])?;
    let energy = additive_energy(&grid2);
    check(&mut out, "2×2 additive energy", energy == 36, format!("{energy}"))?;

    let axis3 = Spectrum::indicator(
        [(0, 0), (1, 0), (2, 0)]
            .into_iter()
            .map(|(x, y)| FreqPoint::new(x, y))
            .collect::<Result<Vec<_>>>()?,
    );
    let hist =
        TauHistogram::from_weighted(&WeightedSupport::from_spectrum(&axis3)?, 64)?;
    let (r0, r2) = (
        hist.bin(0).map_or(0, |b| b.count),
        hist.bin(2).map_or(0, |b| b.count),
    );
    check(
        &mut out,
        "collinear τ-histogram",
        r0 == 15 && r2 == 4 && hist.total_count() == 19,
        format!("τ=0: {r0}, τ=2: {r2}, total {}", hist.total_count()),
    )?;

    let single = SetSpec::Grid(0).load()?;
    let r = strichartz_ratio(&single, Some(std::f64::consts::TAU))?;
    let want = std::f64::consts::TAU.powf(-0.25);
    check(
        &mut out,
        "single-mode full-period ratio",
        (r.ratio - want).abs() <= 1e-12 * want,
        format!("{} vs (2π)^(−1/4)", fmt_float(r.ratio)),
    )?;

    let row = &extremizer_scan::<f64>(&[1])?[0];
    let exact = strichartz_report(&SetSpec::Grid(1).load()?, std::f64::consts::TAU, MethodChoice::Exact)?;
    let diff = (row.l4_norm - exact.l4_norm).abs() / exact.l4_norm;
    check(
        &mut out,
        "grid-fast vs exact σ-sum at N=1",
        diff <= 1e-12,
        format!("rel diff {}", fmt_float(diff)),
    )?;

    let f = SetSpec::Random { n: 30, seed: 5, radius: 8 }.load()?;
    let a = strichartz_report(&f, 1.0, MethodChoice::Exact)?.quartic_integral();
    let b = strichartz_report(&f, 1.0, MethodChoice::Quadrature)?.quartic_integral();
    let diff = (a - b).abs() / a;
    check(
        &mut out,
        "exact vs quadrature oracle",
        diff <= 1e-9,
        format!("rel diff {}", fmt_float(diff)),
    )?;

    let m_grid = rich_lines(&SetSpec::Grid(1).point_set()?, 3, LINE_COLLECTION_CAP)?.len();
    let generic = literal_points(&[(0, 0), (1, 0), (0, 1)])?;
    let m_generic = rich_lines(&generic, 2, LINE_COLLECTION_CAP)?.len();
    check(
        &mut out,
        "rich-line pins",
        m_grid == 8 && m_generic == 3,
        format!("3×3 grid k=3: {m_grid}, generic triple k=2: {m_generic}"),
    )?;

    let f = SetSpec::Grid(8).load()?;
    let trace = decompose(&f, torus_stri_core::incidence::DEFAULT_RICHNESS_C, DECOMPOSE_CAP)?;
    check(
        &mut out,
        "grid:8 peeling",
        trace.complete() && trace.halved_at_every_step() && trace.reconstruct()? == f,
        format!("{} steps", trace.steps().len()),
    )?;

    let zero = window_growth_experiment(
        &Spectrum::new(),
        4,
        Sign::Defocusing,
        0.4,
        0.05,
        1e-2,
        3,
        2,
        16,
    )?;
    check(
        &mut out,
        "zero-data window growth",
        zero.k_obs == 1.0,
        format!("K_obs = {}", fmt_float(zero.k_obs)),
    )?;

    let err = plane_wave_error(Sign::Defocusing)?;
    check(
        &mut out,
        "plane-wave closed form",
        err <= 1e-6,
        format!("max node error {}", fmt_float(err)),
    )?;

    out.push_str("selftest: 9 checks passed\n");
    Ok(out)
}
