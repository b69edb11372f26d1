//! Time-integrated resonance sums: the exact L⁴ space-time integral, its
//! time-averaged majorant, and the gcd divisor filters.
//!
//! Integrating the fourth-power identity of the parent module over
//! `t ∈ [0, T]` pairs the `±σ` quadruples into the even kernel
//!
//! ```text
//! ∫₀^T ∫_{T²} |u|⁴ dx dt = (2π)² Σ_Q f(Q) · K(σ_Q, T),
//! K(σ, T) = sin(σT)/σ  (σ ≠ 0),    K(0, T) = T.
//! ```
//!
//! Averaging the endpoint over `[0, 2T₀]` instead,
//! `κ(τ, T₀) = (1/T₀)∫₀^{2T₀} K(τ, s) ds = (1 − cos(2T₀τ))/(T₀τ²)` with
//! `κ(0, T₀) = 2T₀`, which is absolutely summable in τ and obeys
//! `κ ≤ min{2T₀, 2/(T₀τ²)}` — the workhorse bound for splitting the τ = 0
//! class from the dyadic shells. The shell mass itself is controlled
//! through divisor counting: for `ξ₁ ≠ ξ₄`, `gcd(ξ₁−ξ₄)` divides `τ_Q`,
//! and the density of multiples of `g` in a shell `[M, 2M)` is at most
//! `2/g` ([`dyadic_divisor_density`]).

use crate::error::{CoreError, Result};
use crate::pointset::WeightedSupport;
use crate::quadruple::histogram::TauHistogram;
use crate::quadruple::{weighted_phase_sum, DEFAULT_ENUMERATION_CAP};
use crate::scalar::Scalar;
use crate::spectrum::WeightedSpectrum;

/// `K(σ, T) = sin(σT)/σ`, with the analytic limit `T` at σ = 0 (never a
/// numeric 0/0).
pub fn time_kernel<T: Scalar>(sigma: i64, t: T) -> T {
    if sigma == 0 {
        t
    } else {
        let s = T::from_i64c(sigma);
        (s * t).sin() / s
    }
}

/// `∫_{t₀}^{t₁} e^{-itσ} dt` paired over `±σ`: `(sin(σt₁) − sin(σt₀))/σ`,
/// or `t₁ − t₀` at σ = 0.
pub fn time_kernel_interval<T: Scalar>(sigma: i64, t0: T, t1: T) -> T {
    if sigma == 0 {
        t1 - t0
    } else {
        let s = T::from_i64c(sigma);
        ((s * t1).sin() - (s * t0).sin()) / s
    }
}

/// Averaged kernel `κ(τ, T₀) = (1 − cos(2T₀τ))/(T₀τ²)`, `κ(0, T₀) = 2T₀`.
///
/// τ beyond 2⁵³ is rounded by the float conversion; the kernel is already
/// far below any tolerance there.
pub fn averaged_kernel<T: Scalar>(tau: u64, t0: T) -> T {
    if tau == 0 {
        (T::one() + T::one()) * t0
    } else {
        let tf = T::from_f64c(tau as f64);
        (T::one() - ((T::one() + T::one()) * t0 * tf).cos()) / (t0 * tf * tf)
    }
}

fn require_positive<T: Scalar>(x: T, what: &str) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(CoreError::validation(format!(
            "{what} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

/// Exact value of `∫₀^T ∫_{T²} |e^{itΔ}φ|⁴ dx dt` for `φ = Σ f(ξ)e^{iξ·x}`
/// with nonnegative real `f`, by full quadruple enumeration.
pub fn l4_time_integral<T: Scalar>(f: &WeightedSpectrum<T>, t: T) -> Result<T> {
    l4_time_integral_capped(f, t, DEFAULT_ENUMERATION_CAP)
}

/// [`l4_time_integral`] with an explicit support-size cap.
pub fn l4_time_integral_capped<T: Scalar>(f: &WeightedSpectrum<T>, t: T, cap: usize) -> Result<T> {
    require_positive(t, "integration time")?;
    let ws = WeightedSupport::from_spectrum(f)?;
    let tp = T::two_pi();
    Ok(tp * tp * weighted_phase_sum(&ws, cap, |s| time_kernel(s, t))?)
}

/// Exact value of the same integral over `t ∈ [t₀, t₁]`.
pub fn l4_time_integral_interval<T: Scalar>(f: &WeightedSpectrum<T>, t0: T, t1: T) -> Result<T> {
    if !t0.is_finite() || !t1.is_finite() || t0 > t1 {
        return Err(CoreError::validation(format!(
            "invalid integration interval [{t0}, {t1}]"
        )));
    }
    let ws = WeightedSupport::from_spectrum(f)?;
    let tp = T::two_pi();
    Ok(tp * tp * weighted_phase_sum(&ws, DEFAULT_ENUMERATION_CAP, |s| {
        time_kernel_interval(s, t0, t1)
    })?)
}

/// `Σ_Q f(Q) · κ(τ_Q, T₀)` — the time-averaged fourth-power sum. No
/// `(2π)²` prefactor: this is the plain weighted quadruple sum.
pub fn averaged_kernel_sum<T: Scalar>(f: &WeightedSpectrum<T>, t0: T) -> Result<T> {
    require_positive(t0, "averaging half-window")?;
    let ws = WeightedSupport::from_spectrum(f)?;
    weighted_phase_sum(&ws, DEFAULT_ENUMERATION_CAP, |s| {
        averaged_kernel(s.unsigned_abs(), t0)
    })
}

fn require_shell(m: u64) -> Result<()> {
    if !m.is_power_of_two() || m > (1 << 62) {
        return Err(CoreError::validation(format!(
            "dyadic shell base must be a power of two below 2^63, got {m}"
        )));
    }
    Ok(())
}

/// `(1/M) Σ_{τ ∈ [M, 2M)} Σ_{Q ∈ 𝒬^τ} f(Q)` — the mass of one dyadic shell
/// per unit τ.
///
/// Computed twice — from the τ-histogram and by a direct filtered
/// enumeration — and cross-checked to 1e−9 relative before returning the
/// histogram value.
pub fn gcd_filtered_average<T: Scalar>(f: &WeightedSpectrum<T>, m: u64) -> Result<T> {
    require_shell(m)?;
    let ws = WeightedSupport::from_spectrum(f)?;
    let hist = TauHistogram::from_weighted(&ws, DEFAULT_ENUMERATION_CAP)?;
    let (_, shell_weight) = hist.range_sum(m, 2 * m);
    let direct = weighted_phase_sum(&ws, DEFAULT_ENUMERATION_CAP, |s| {
        let tau = s.unsigned_abs();
        if tau >= m && tau < 2 * m {
            T::one()
        } else {
            T::zero()
        }
    })?;
    let scale = T::one().max(shell_weight.abs());
    if (shell_weight - direct).abs() > T::from_f64c(1e-9) * scale {
        return Err(CoreError::numerical(format!(
            "shell mass cross-check failed: histogram {shell_weight}, direct {direct}"
        )));
    }
    Ok(shell_weight / T::from_f64c(m as f64))
}

/// Density of multiples of `g` in the shell `[M, 2M)`: exact integer count
/// divided by `M`. Always at most `2/g`, the divisor bound that caps how
/// often a fixed side gcd can resonate inside one shell.
pub fn dyadic_divisor_density(g: u64, m: u64) -> Result<f64> {
    if g == 0 {
        return Err(CoreError::validation("divisor must be positive"));
    }
    require_shell(m)?;
    let count = (2 * m - 1) / g - (m - 1) / g;
    Ok(count as f64 / m as f64)
}
