//! Free Schrödinger flow on `T²` and the Strichartz-ratio experiments
//! built on it.
//!
//! The propagator acts diagonally on spectra, `f(ξ) ↦ e^{−it|ξ|²} f(ξ)`,
//! so evolution is exact; everything nontrivial lives in the functionals.
//! `strichartz_ratio` measures `‖e^{itΔ}φ‖_{L⁴([0,T]×T²)} / ‖φ‖_{L²(T²)}`,
//! switching between the exact σ-sum and the quadrature oracle;
//! `extremizer_scan` runs the full-period sharpness scan on centered boxes
//! `[−N, N]²`, where only zero-phase quadruples survive and the quartic
//! integral collapses to `(2π)³ ·` (rectangle count); `cube_local_check`
//! evaluates the same ratio for piecewise-free atoms projected onto one
//! dyadic frequency cube, the shape of the localized estimate that drives
//! the nonlinear theory.

pub mod grid;
pub mod quadrature;

use std::fmt;

use crate::error::{CoreError, Result};
use crate::numeric::{fmt_float, log_clamped, NeumaierSum};
use crate::quadruple::{l4_time_integral_capped, l4_time_integral_interval, rectangle_count_box, LatticeBox};
use crate::scalar::{cis, Scalar};
use crate::spectrum::{CubeProjection, WeightedSpectrum};

pub use grid::{
    quartic_grid_size, sample_physical, sample_physical_direct, synthesis_grid_size, PhysicalGrid,
};
pub use quadrature::{
    auto_panels, gauss_legendre, l4_quadrature, l4_quadrature_estimated, l4_quadrature_with_nodes,
    QuadratureEstimate, DEFAULT_PANEL_NODES, NODES_PER_PERIOD,
};

/// Largest support for which ratio computations enumerate quadruples
/// exactly; beyond it they fall back to quadrature. Cubic in the support
/// size, so this bound keeps a single ratio call around a second.
pub const STRICHARTZ_EXACT_CAP: usize = 512;

/// Applies `e^{itΔ}`: multiplies each amplitude by `e^{−it|ξ|²}`.
pub fn evolve<T: Scalar>(f: &WeightedSpectrum<T>, t: T) -> WeightedSpectrum<T> {
    let mut out = WeightedSpectrum::new();
    for (p, amp) in f.iter() {
        out.set(p, amp * cis(-t * T::from_i64c(p.norm_sq())));
    }
    out
}

/// How a quartic space-time integral was computed.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RatioMethod {
    /// Exact weighted sum over lattice parallelograms.
    ExactSigma,
    /// Composite Gauss–Legendre in time, exact node averages in space.
    Quadrature,
    /// Closed-form rectangle count of a centered box at full period.
    GridFast,
}

impl RatioMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RatioMethod::ExactSigma => "exact-sigma",
            RatioMethod::Quadrature => "quadrature",
            RatioMethod::GridFast => "grid-fast",
        }
    }
}

impl fmt::Display for RatioMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One Strichartz-ratio measurement.
#[derive(Copy, Clone, Debug)]
pub struct StrichartzReport<T> {
    pub support_size: usize,
    pub t_max: T,
    /// `‖e^{itΔ}φ‖_{L⁴([0,T]×T²)}`.
    pub l4_norm: T,
    /// `‖φ‖_{L²(T²)}`.
    pub l2_norm: T,
    /// `l4_norm / l2_norm`.
    pub ratio: T,
    pub method: RatioMethod,
}

impl<T: Scalar> StrichartzReport<T> {
    /// `∫₀^T ∫ |e^{itΔ}φ|⁴`, the fourth power of the numerator.
    pub fn quartic_integral(&self) -> T {
        self.l4_norm.powi(4)
    }
}

fn quartic_integral_auto<T: Scalar>(f: &WeightedSpectrum<T>, t: T) -> Result<(T, RatioMethod)> {
    let exact_ok = f.support_size() <= STRICHARTZ_EXACT_CAP && f.nonnegative_entries().is_ok();
    if exact_ok {
        Ok((l4_time_integral_capped(f, t, STRICHARTZ_EXACT_CAP)?, RatioMethod::ExactSigma))
    } else {
        Ok((l4_quadrature(f, t, auto_panels(f, t))?, RatioMethod::Quadrature))
    }
}

/// `‖e^{itΔ}φ‖_{L⁴([0,T]×T²)} / ‖φ‖_{L²(T²)}` with `T` defaulting to
/// `1/log #supp` under the clamped logarithm `log x = max{1, ln x}`.
///
/// Small nonnegative spectra go through the exact σ-sum; everything else
/// through quadrature. Errors on empty input.
pub fn strichartz_ratio<T: Scalar>(
    f: &WeightedSpectrum<T>,
    t_max: Option<T>,
) -> Result<StrichartzReport<T>> {
    if f.is_empty() {
        return Err(CoreError::validation("Strichartz ratio of the empty spectrum"));
    }
    let t = match t_max {
        Some(t) => t,
        None => T::one() / log_clamped(T::from_f64c(f.support_size() as f64)),
    };
    if !t.is_finite() || t <= T::zero() {
        return Err(CoreError::validation(format!("time horizon must be positive, got {t}")));
    }
    let (quartic, method) = quartic_integral_auto(f, t)?;
    let l4 = quartic.max(T::zero()).powf(T::from_f64c(0.25));
    let l2 = f.l2_function_norm();
    Ok(StrichartzReport {
        support_size: f.support_size(),
        t_max: t,
        l4_norm: l4,
        l2_norm: l2,
        ratio: l4 / l2,
        method,
    })
}

/// One row of the sharpness scan.
#[derive(Copy, Clone, Debug)]
pub struct ScanRow<T> {
    /// Box parameter: the spectrum is `χ` on `[−N, N]² ∩ Z²`.
    pub n: i64,
    pub t_max: T,
    pub l4_norm: T,
    pub l2_norm: T,
    pub ratio: T,
    /// `ratio⁴ / log N` — the quantity the sharp example keeps bounded.
    pub ratio4_over_logn: T,
    pub method: RatioMethod,
    /// Wall-clock seconds; stays 0 unless a caller opts into timing.
    pub seconds: f64,
}

/// Full-period ratio scan over centered boxes `[−N, N]²`.
///
/// At `T = 2π` every phase `e^{−iσt}` integrates to zero unless `σ = 0`,
/// so the quartic integral is `(2π)³ ·` (number of lattice rectangles in
/// the box, degenerate ones included), available in closed form.
pub fn extremizer_scan<T: Scalar>(n_list: &[i64]) -> Result<Vec<ScanRow<T>>> {
    let tp = T::two_pi();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let b = LatticeBox::centered(n)?;
        let rect = rectangle_count_box(&b)?;
        let points = b.point_count() as f64;
        let quartic = tp * tp * tp * T::from_f64c(rect as f64);
        let l4 = quartic.powf(T::from_f64c(0.25));
        let l2 = tp * T::from_f64c(points).sqrt();
        let ratio = l4 / l2;
        rows.push(ScanRow {
            n,
            t_max: tp,
            l4_norm: l4,
            l2_norm: l2,
            ratio,
            ratio4_over_logn: ratio.powi(4) / log_clamped(T::from_i64c(n)),
            method: RatioMethod::GridFast,
            seconds: 0.0,
        });
    }
    Ok(rows)
}

/// CSV export of scan rows: `N,T,l4,l2,ratio,ratio4_over_logN,method,seconds`.
pub fn scan_csv<T: Scalar>(rows: &[ScanRow<T>]) -> String {
    let mut out = String::from("N,T,l4,l2,ratio,ratio4_over_logN,method,seconds\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            fmt_float(r.t_max),
            fmt_float(r.l4_norm),
            fmt_float(r.l2_norm),
            fmt_float(r.ratio),
            fmt_float(r.ratio4_over_logn),
            r.method,
            fmt_float(r.seconds),
        ));
    }
    out
}

/// A piecewise-free function: `u(t) = Σ_j 1_{[t_{j−1}, t_j)}(t) e^{itΔ} φ_j`.
#[derive(Clone, Debug)]
pub struct PiecewiseFreeAtom<T: Scalar> {
    pieces: Vec<WeightedSpectrum<T>>,
    breakpoints: Vec<T>,
}

impl<T: Scalar> PiecewiseFreeAtom<T> {
    /// `breakpoints` must contain one more entry than `pieces`, strictly
    /// increasing and finite.
    pub fn new(pieces: Vec<WeightedSpectrum<T>>, breakpoints: Vec<T>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(CoreError::validation("atom needs at least one piece"));
        }
        if breakpoints.len() != pieces.len() + 1 {
            return Err(CoreError::validation(format!(
                "{} pieces need {} breakpoints, got {}",
                pieces.len(),
                pieces.len() + 1,
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|t| !t.is_finite())
            || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(CoreError::validation("breakpoints must increase strictly"));
        }
        Ok(Self { pieces, breakpoints })
    }

    /// Single-piece atom: the free solution with datum `f` on `[t0, t1)`.
    pub fn free(f: WeightedSpectrum<T>, t0: T, t1: T) -> Result<Self> {
        Self::new(vec![f], vec![t0, t1])
    }

    pub fn pieces(&self) -> &[WeightedSpectrum<T>] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// The time interval the atom lives on.
    pub fn interval(&self) -> (T, T) {
        (self.breakpoints[0], *self.breakpoints.last().expect("nonempty"))
    }
}

/// Result of projecting an atom onto one frequency cube.
#[derive(Copy, Clone, Debug)]
pub struct CubeLocalReport<T> {
    /// `∫_I ∫ |P_C u|⁴`.
    pub quartic_integral: T,
    /// Its fourth root.
    pub l4_norm: T,
    /// `(Σ_j ‖φ_j‖⁴_{L²})^{1/4}` over the *unprojected* pieces.
    pub atom_norm: T,
    /// `l4_norm / atom_norm`.
    pub ratio: T,
    pub method: RatioMethod,
}

/// `‖P_C u‖_{L⁴(I×T²)} / (Σ_j ‖φ_j‖⁴_{L²})^{1/4}` for a piecewise-free
/// atom and one dyadic cube.
///
/// The pieces occupy disjoint time slabs, so the quartic integral splits
/// into per-piece interval integrals of free evolutions: exact σ-sums when
/// the projected support is small and nonnegative, otherwise a quadrature
/// of the time-translated datum.
pub fn cube_local_check<T: Scalar>(
    atom: &PiecewiseFreeAtom<T>,
    cube: &CubeProjection,
) -> Result<CubeLocalReport<T>> {
    let mut quartic = NeumaierSum::new();
    let mut mass4 = NeumaierSum::new();
    let mut all_exact = true;
    for (j, piece) in atom.pieces().iter().enumerate() {
        let t0 = atom.breakpoints()[j];
        let t1 = atom.breakpoints()[j + 1];
        let proj = piece.restrict(|p| cube.contains(p));
        if !proj.is_empty() {
            let exact_ok =
                proj.support_size() <= STRICHARTZ_EXACT_CAP && proj.nonnegative_entries().is_ok();
            if exact_ok {
                quartic.add(l4_time_integral_interval(&proj, t0, t1)?);
            } else {
                let shifted = evolve(&proj, t0);
                let len = t1 - t0;
                quartic.add(l4_quadrature(&shifted, len, auto_panels(&shifted, len))?);
                all_exact = false;
            }
        }
        mass4.add(piece.l2_function_norm().powi(4));
    }
    let denom4 = mass4.value();
    if !(denom4 > T::zero()) {
        return Err(CoreError::validation("atom carries no mass"));
    }
    let q = quartic.value().max(T::zero());
    let quarter = T::from_f64c(0.25);
    let l4 = q.powf(quarter);
    let atom_norm = denom4.powf(quarter);
    Ok(CubeLocalReport {
        quartic_integral: q,
        l4_norm: l4,
        atom_norm,
        ratio: l4 / atom_norm,
        method: if all_exact { RatioMethod::ExactSigma } else { RatioMethod::Quadrature },
    })
}
