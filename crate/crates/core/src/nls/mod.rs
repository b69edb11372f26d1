//! Split-step spectral integrator for the cubic NLS on `T²`,
//! `i u_t + Δu = ±|u|²u`, with conserved-quantity tracking and the
//! logarithmic-window `H^s`-growth experiment.
//!
//! The state is the sampled field on a fixed square grid, which makes both
//! split flows exact: the linear flow is a diagonal phase in the grid's
//! frequencies, the nonlinear flow `i u_t = ±|u|²u` is a pointwise phase
//! rotation `u ← u·e^{∓i|u|²Δt}`, and Strang composition of the two is the
//! second-order scheme. Both substeps preserve the grid mass
//! `(2π)²·mean|u|²` to roundoff, so mass survives long trajectories at the
//! 1e−12 level — that is the reason the state is never re-truncated to the
//! data's band limit mid-run. The cutoff `N` constrains the *initial* data
//! to `[−N, N]²` and sizes the grid with a de-aliasing margin: the default
//! `4N+3` points per axis keep the first cubic interaction band
//! `[−3N, 3N]²` alias-free inside the retained band.
//!
//! The window experiment integrates across windows of length
//! `τ_j = 1/(2·log N_j)`, `N_j = K^j N₀`, and records the per-window `H^s`
//! growth factors; the largest one is the observed ladder constant `K_obs`.
//! The window lengths mirror the divergent series `Σ_N 1/log N`, so any
//! uniform bound on the factors extends the reachable horizon arbitrarily.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftDirection};

use crate::error::{CoreError, Result};
use crate::numeric::{fmt_float, log_clamped, NeumaierSum};
use crate::propagator::grid::{dft_2d, plan, sample_physical, PhysicalGrid};
use crate::scalar::{cis, Scalar};
use crate::spectrum::WeightedSpectrum;

/// Sign of the nonlinearity in `i u_t + Δu = ±|u|²u`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Sign {
    /// `+|u|²u`: Hamiltonian `∫|∇u|² + ½∫|u|⁴`, coercive.
    Defocusing,
    /// `−|u|²u`.
    Focusing,
}

impl Sign {
    pub fn factor<T: Scalar>(self) -> T {
        match self {
            Sign::Defocusing => T::one(),
            Sign::Focusing => -T::one(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Defocusing => "defocusing",
            Sign::Focusing => "focusing",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Default grid for cutoff `N`: `4N+3` points per axis — odd, and at least
/// the `3N` de-aliasing minimum with one cubic band to spare.
pub fn default_grid_size(cutoff: i64) -> usize {
    (4 * cutoff + 3) as usize
}

/// Sampled solution state of the cubic NLS flow.
///
/// `cutoff` is the band limit of the initial data; the running field lives
/// on the full grid.
#[derive(Clone)]
pub struct NLSField<T: Scalar> {
    grid: PhysicalGrid<T>,
    cutoff: i64,
    sign: Sign,
    t: T,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// `|ξ|²` of the centered lift of each grid slot, in slot order.
    slot_norm_sq: Vec<T>,
}

impl<T: Scalar> fmt::Debug for NLSField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NLSField")
            .field("cutoff", &self.cutoff)
            .field("n_x", &self.grid.n_x())
            .field("sign", &self.sign)
            .field("t", &self.t)
            .finish()
    }
}

fn check_cutoff(cutoff: i64) -> Result<()> {
    if cutoff < 1 || (cutoff as u64) & (cutoff as u64 - 1) != 0 {
        return Err(CoreError::validation(format!(
            "cutoff must be a positive power of two, got {cutoff}"
        )));
    }
    Ok(())
}

impl<T: Scalar> NLSField<T> {
    /// State at `t = 0` from initial data supported in `[−N, N]²`, on the
    /// default grid.
    pub fn from_spectrum(f: &WeightedSpectrum<T>, cutoff: i64, sign: Sign) -> Result<Self> {
        Self::with_grid(f, cutoff, sign, default_grid_size(cutoff))
    }

    /// Same with an explicit grid; `n_x` must be odd and at least the `3N`
    /// de-aliasing minimum.
    pub fn with_grid(
        f: &WeightedSpectrum<T>,
        cutoff: i64,
        sign: Sign,
        n_x: usize,
    ) -> Result<Self> {
        check_cutoff(cutoff)?;
        if f.max_abs_coord() > cutoff {
            return Err(CoreError::validation(format!(
                "initial data reaches frequency {} outside the cutoff band [−{cutoff}, {cutoff}]²",
                f.max_abs_coord()
            )));
        }
        if (n_x as i64) < 3 * cutoff {
            return Err(CoreError::validation(format!(
                "grid of {n_x} points per axis cannot de-alias the cubic term at cutoff {cutoff}"
            )));
        }
        let grid = sample_physical(f, n_x)?;
        let fwd = plan::<T>(n_x, FftDirection::Forward);
        let inv = plan::<T>(n_x, FftDirection::Inverse);
        let half = (n_x as i64 - 1) / 2;
        let lift = |m: usize| {
            let m = m as i64;
            if m > half {
                m - n_x as i64
            } else {
                m
            }
        };
        let mut slot_norm_sq = Vec::with_capacity(n_x * n_x);
        for ix in 0..n_x {
            let kx = lift(ix);
            for iy in 0..n_x {
                let ky = lift(iy);
                slot_norm_sq.push(T::from_i64c(kx * kx + ky * ky));
            }
        }
        Ok(Self { grid, cutoff, sign, t: T::zero(), fwd, inv, slot_norm_sq })
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn n_x(&self) -> usize {
        self.grid.n_x()
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn samples(&self) -> &[Complex<T>] {
        self.grid.samples()
    }

    /// Grid coefficients of the current field, centered lift.
    pub fn spectrum(&self) -> WeightedSpectrum<T> {
        self.grid.analyze()
    }

    /// `(2π)² ·` mean of `|u|²` — the conserved mass.
    pub fn mass(&self) -> T {
        self.grid.integral_abs2()
    }

    /// `∫|∇u|² ± ½∫|u|⁴` evaluated in the grid's own frequencies.
    pub fn hamiltonian(&self) -> T {
        let n = self.grid.n_x();
        let mut buf = self.grid.samples().to_vec();
        let mut scratch = Vec::new();
        dft_2d(&self.fwd, &mut buf, n, &mut scratch);
        let mut kin = NeumaierSum::new();
        for (slot, z) in buf.iter().enumerate() {
            kin.add(self.slot_norm_sq[slot] * z.norm_sqr());
        }
        let n2 = T::from_f64c((n * n) as f64);
        let tp = T::two_pi();
        let kinetic = tp * tp * kin.value() / (n2 * n2);
        let quartic = tp * tp * self.grid.mean_abs4();
        kinetic + self.sign.factor::<T>() * T::from_f64c(0.5) * quartic
    }

    /// `2π · (Σ_ξ (1+|ξ|²)^s |f̂(ξ)|²)^{1/2}` over the grid coefficients;
    /// `s` must lie in `(0, 1]`.
    pub fn sobolev_norm(&self, s: T) -> Result<T> {
        check_sobolev_index(s)?;
        let n = self.grid.n_x();
        let mut buf = self.grid.samples().to_vec();
        let mut scratch = Vec::new();
        dft_2d(&self.fwd, &mut buf, n, &mut scratch);
        let mut acc = NeumaierSum::new();
        for (slot, z) in buf.iter().enumerate() {
            acc.add((T::one() + self.slot_norm_sq[slot]).powf(s) * z.norm_sqr());
        }
        let n2 = T::from_f64c((n * n) as f64);
        Ok(T::two_pi() * (acc.value() / (n2 * n2)).sqrt())
    }

    /// Exact flow of `i u_t + Δu = 0` for time `dt`: diagonal phase
    /// `e^{−i dt |ξ|²}` in the grid frequencies. An ℓ² isometry.
    pub fn linear_step(&mut self, dt: T) {
        self.apply_linear_phase(dt);
        self.t += dt;
    }

    /// Exact flow of `i u_t = ±|u|²u` for time `dt`: the pointwise rotation
    /// `u ← u·e^{∓i|u|²dt}`, which preserves `|u|` at every node.
    pub fn nonlinear_step(&mut self, dt: T) {
        self.apply_nonlinear_phase(dt);
        self.t += dt;
    }

    /// One Strang step: half nonlinear, full linear, half nonlinear. This
    /// ordering needs a single forward/inverse transform pair per step,
    /// since the pointwise rotations act directly on the nodes. Errors with
    /// a diagnostic if the field stops being finite.
    pub fn strang_step(&mut self, dt: T) -> Result<()> {
        let half = dt * T::from_f64c(0.5);
        self.apply_nonlinear_phase(half);
        self.apply_linear_phase(dt);
        self.apply_nonlinear_phase(half);
        self.t += dt;
        self.check_finite()
    }

    fn apply_linear_phase(&mut self, dt: T) {
        let n = self.grid.n_x();
        let mut scratch = Vec::new();
        let buf = self.grid.samples_mut();
        dft_2d(&self.fwd, buf, n, &mut scratch);
        // Divide by the exactly representable n² rather than multiplying by
        // a pre-rounded 1/n²: the constant's rounding bias would otherwise
        // leak into the mass at every step and accumulate linearly.
        let n2 = T::from_f64c((n * n) as f64);
        for (slot, z) in buf.iter_mut().enumerate() {
            *z = *z * cis(-dt * self.slot_norm_sq[slot]) / n2;
        }
        dft_2d(&self.inv, buf, n, &mut scratch);
    }

    fn apply_nonlinear_phase(&mut self, dt: T) {
        let sgn = self.sign.factor::<T>();
        for z in self.grid.samples_mut() {
            *z *= cis(-sgn * z.norm_sqr() * dt);
        }
    }

    fn check_finite(&self) -> Result<()> {
        if self.grid.samples().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(CoreError::numerical(format!(
                "field lost finiteness at t = {}",
                self.t
            )))
        }
    }

    /// Grid `L²(T²)` distance to another state on the same grid.
    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        if self.grid.n_x() != other.grid.n_x() {
            return Err(CoreError::validation(format!(
                "cannot compare fields on {}- and {}-point grids",
                self.grid.n_x(),
                other.grid.n_x()
            )));
        }
        let mut acc = NeumaierSum::new();
        for (a, b) in self.grid.samples().iter().zip(other.grid.samples()) {
            acc.add((a - b).norm_sqr());
        }
        let mean = acc.value() / T::from_f64c((self.grid.n_x() * self.grid.n_x()) as f64);
        Ok(T::two_pi() * mean.sqrt())
    }
}

fn check_sobolev_index<T: Scalar>(s: T) -> Result<()> {
    if !(s > T::zero() && s <= T::one()) {
        return Err(CoreError::validation(format!(
            "Sobolev index must lie in (0, 1], got {s}"
        )));
    }
    Ok(())
}

/// `2π · (Σ (1+|ξ|²)^s |f(ξ)|²)^{1/2}` straight off a spectrum — the
/// summation oracle for [`NLSField::sobolev_norm`].
pub fn sobolev_norm_of<T: Scalar>(f: &WeightedSpectrum<T>, s: T) -> Result<T> {
    check_sobolev_index(s)?;
    let mut acc = NeumaierSum::new();
    for (p, amp) in f.iter() {
        acc.add((T::one() + T::from_i64c(p.norm_sq())).powf(s) * amp.norm_sqr());
    }
    Ok(T::two_pi() * acc.value().sqrt())
}

/// One recorded trajectory sample.
#[derive(Copy, Clone, Debug)]
pub struct TrajectoryRow<T> {
    pub t: T,
    pub mass: T,
    pub hamiltonian: T,
    pub hs_norm: T,
    /// Window the sample belongs to; 0 for plain trajectories.
    pub window_index: usize,
    /// `hs_norm` relative to the start of the row's window (1 where the
    /// window started empty).
    pub growth_factor: T,
}

fn record_row<T: Scalar>(
    state: &NLSField<T>,
    s: T,
    window_index: usize,
    hs_window_start: T,
) -> Result<TrajectoryRow<T>> {
    let hs = state.sobolev_norm(s)?;
    let growth = if hs_window_start > T::zero() { hs / hs_window_start } else { T::one() };
    Ok(TrajectoryRow {
        t: state.time(),
        mass: state.mass(),
        hamiltonian: state.hamiltonian(),
        hs_norm: hs,
        window_index,
        growth_factor: growth,
    })
}

/// Integrates `state` to `t_final` with uniform steps of at most `dt`,
/// recording every `record_stride`-th step (the initial and final states
/// always included).
pub fn integrate<T: Scalar>(
    state: &mut NLSField<T>,
    t_final: T,
    dt: T,
    s: T,
    record_stride: usize,
) -> Result<Vec<TrajectoryRow<T>>> {
    check_sobolev_index(s)?;
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(CoreError::validation(format!("step size must be positive, got {dt}")));
    }
    if record_stride == 0 {
        return Err(CoreError::validation("record stride must be at least 1"));
    }
    let span = t_final - state.time();
    if !(span > T::zero()) || !span.is_finite() {
        return Err(CoreError::validation(format!(
            "final time {t_final} does not lie ahead of the state time {}",
            state.time()
        )));
    }
    let n_steps = (span / dt).to_f64().unwrap_or(f64::NAN).ceil() as usize;
    let n_steps = n_steps.max(1);
    let step = span / T::from_f64c(n_steps as f64);
    let hs0 = state.sobolev_norm(s)?;
    let mut rows = vec![record_row(state, s, 0, hs0)?];
    for k in 0..n_steps {
        state.strang_step(step)?;
        if (k + 1) % record_stride == 0 || k + 1 == n_steps {
            rows.push(record_row(state, s, 0, hs0)?);
        }
    }
    Ok(rows)
}

/// Richardson order estimate of the splitting: integrates `u₀` to
/// `t_final` with steps `dt, dt/2, dt/4` and returns
/// `log₂(‖u_dt − u_{dt/2}‖ / ‖u_{dt/2} − u_{dt/4}‖)`.
pub fn measured_order<T: Scalar>(
    u0: &WeightedSpectrum<T>,
    cutoff: i64,
    sign: Sign,
    t_final: T,
    dt: T,
) -> Result<T> {
    if !(t_final > T::zero()) || !(dt > T::zero()) {
        return Err(CoreError::validation("order measurement needs positive horizon and step"));
    }
    let base_steps = (t_final / dt).to_f64().unwrap_or(f64::NAN).ceil().max(1.0) as usize;
    let mut finals = Vec::new();
    for refinement in [1usize, 2, 4] {
        let steps = base_steps * refinement;
        let mut state = NLSField::from_spectrum(u0, cutoff, sign)?;
        let step = t_final / T::from_f64c(steps as f64);
        for _ in 0..steps {
            state.strang_step(step)?;
        }
        finals.push(state);
    }
    let d1 = finals[0].l2_distance(&finals[1])?;
    let d2 = finals[1].l2_distance(&finals[2])?;
    if !(d2 > T::zero()) {
        return Err(CoreError::numerical(
            "refinement differences vanished; horizon too short to measure an order",
        ));
    }
    Ok((d1 / d2).ln() / T::from_f64c(2.0).ln())
}

/// Result of the logarithmic-window growth experiment.
#[derive(Clone, Debug)]
pub struct WindowReport<T> {
    pub rows: Vec<TrajectoryRow<T>>,
    /// `τ_j = 1/(2·log N_j)` per window.
    pub window_lengths: Vec<T>,
    /// `H^s` growth factor of each window.
    pub factors: Vec<T>,
    /// Largest factor — the observed ladder constant.
    pub k_obs: T,
    /// `Σ_j τ_j`, the horizon actually reached.
    pub total_time: T,
}

impl<T: Scalar> WindowReport<T> {
    /// CSV export: `t,mass,hamiltonian,hs_norm,window_index,growth_factor`.
    pub fn to_csv(&self) -> String {
        trajectory_csv(&self.rows)
    }
}

/// CSV export of trajectory rows.
pub fn trajectory_csv<T: Scalar>(rows: &[TrajectoryRow<T>]) -> String {
    let mut out = String::from("t,mass,hamiltonian,hs_norm,window_index,growth_factor\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_float(r.t),
            fmt_float(r.mass),
            fmt_float(r.hamiltonian),
            fmt_float(r.hs_norm),
            r.window_index,
            fmt_float(r.growth_factor),
        ));
    }
    out
}

/// Integrates across `windows` windows of length `τ_j = 1/(2·log N_j)`,
/// `N_j = k_probe^j · N₀`, recording per-window `H^s` growth factors.
///
/// The data is rescaled to `‖u₀‖_{L²(T²)} = delta` first (left untouched
/// when `u₀ = 0` or `delta = 0`). Steps within a window are uniform and no
/// larger than `dt`.
#[allow(clippy::too_many_arguments)]
pub fn window_growth_experiment<T: Scalar>(
    u0: &WeightedSpectrum<T>,
    cutoff: i64,
    sign: Sign,
    s: T,
    delta: T,
    dt: T,
    windows: usize,
    k_probe: i64,
    record_stride: usize,
) -> Result<WindowReport<T>> {
    check_sobolev_index(s)?;
    if windows == 0 {
        return Err(CoreError::validation("window experiment needs at least one window"));
    }
    if k_probe < 2 {
        return Err(CoreError::validation(format!(
            "ladder ratio must be at least 2, got {k_probe}"
        )));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(CoreError::validation(format!("step size must be positive, got {dt}")));
    }
    if !(delta >= T::zero()) || !delta.is_finite() {
        return Err(CoreError::validation(format!("data size must be nonnegative, got {delta}")));
    }
    if record_stride == 0 {
        return Err(CoreError::validation("record stride must be at least 1"));
    }

    let norm = u0.l2_function_norm();
    let mut data = WeightedSpectrum::new();
    if norm > T::zero() && delta > T::zero() {
        let scale = delta / norm;
        for (p, amp) in u0.iter() {
            data.set(p, amp * scale);
        }
    }
    let mut state = NLSField::from_spectrum(&data, cutoff, sign)?;

    let mut rows = Vec::new();
    let mut window_lengths = Vec::new();
    let mut factors = Vec::new();
    let mut total = NeumaierSum::new();
    let hs_initial = state.sobolev_norm(s)?;
    rows.push(record_row(&state, s, 0, hs_initial)?);

    for j in 0..windows {
        let n_j = u32::try_from(j)
            .ok()
            .and_then(|e| k_probe.checked_pow(e))
            .and_then(|r| r.checked_mul(cutoff))
            .ok_or_else(|| {
                CoreError::validation(format!("ladder overflows at window {j}"))
            })?;
        let tau = T::one() / (T::from_f64c(2.0) * log_clamped(T::from_i64c(n_j)));
        window_lengths.push(tau);
        total.add(tau);

        let hs_start = state.sobolev_norm(s)?;
        let n_steps = (tau / dt).to_f64().unwrap_or(f64::NAN).ceil().max(1.0) as usize;
        let step = tau / T::from_f64c(n_steps as f64);
        for k in 0..n_steps {
            state.strang_step(step)?;
            if (k + 1) % record_stride == 0 || k + 1 == n_steps {
                rows.push(record_row(&state, s, j, hs_start)?);
            }
        }
        let hs_end = state.sobolev_norm(s)?;
        factors.push(if hs_start > T::zero() { hs_end / hs_start } else { T::one() });
    }

    let k_obs = factors.iter().copied().fold(T::zero(), |a, b| a.max(b));
    Ok(WindowReport {
        rows,
        window_lengths,
        factors,
        k_obs,
        total_time: total.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fp;
    use crate::sampling::{random_positive_spectrum, random_spectrum};
    use std::f64::consts::TAU;

    fn plane_wave(amp: f64, xi: (i64, i64)) -> WeightedSpectrum<f64> {
        let mut f = WeightedSpectrum::new();
        f.set_real(fp(xi.0, xi.1), amp);
        f
    }

    fn smooth_data(seed: u64, norm: f64) -> WeightedSpectrum<f64> {
        let raw = random_spectrum::<f64>(seed, 25, 4).unwrap();
        let scale = norm / raw.l2_function_norm();
        let mut f = WeightedSpectrum::new();
        for (p, amp) in raw.iter() {
            f.set(p, amp * scale);
        }
        f
    }

    #[test]
    fn construction_validates_cutoff_band_and_grid() {
        let f = plane_wave(1.0, (3, 0));
        assert!(NLSField::from_spectrum(&f, 3, Sign::Defocusing).is_err()); // not dyadic
        assert!(NLSField::from_spectrum(&f, 2, Sign::Defocusing).is_err()); // band too small
        let state = NLSField::from_spectrum(&f, 4, Sign::Defocusing).unwrap();
        assert_eq!(state.n_x(), 19);
        assert_eq!(default_grid_size(4), 19);
        assert!(NLSField::with_grid(&f, 4, Sign::Defocusing, 11).is_err()); // < 3N
        assert!(NLSField::with_grid(&f, 4, Sign::Defocusing, 13).is_ok());
    }

    #[test]
    fn linear_step_is_the_free_group() {
        let f = smooth_data(1, 1.0);
        let mut a = NLSField::from_spectrum(&f, 4, Sign::Defocusing).unwrap();
        let before = a.samples().to_vec();
        a.linear_step(0.0);
        for (x, y) in a.samples().iter().zip(&before) {
            assert!((x - y).norm() < 1e-15);
        }
        a.linear_step(TAU);
        for (x, y) in a.samples().iter().zip(&before) {
            assert!((x - y).norm() < 1e-12);
        }
        // two half steps equal one full step
        let mut b = NLSField::from_spectrum(&f, 4, Sign::Defocusing).unwrap();
        let mut c = b.clone();
        b.linear_step(0.23);
        b.linear_step(0.23);
        c.linear_step(0.46);
        for (x, y) in b.samples().iter().zip(c.samples()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn nonlinear_step_rotates_pointwise() {
        let mut state = NLSField::from_spectrum(&plane_wave(0.8, (0, 0)), 1, Sign::Defocusing)
            .unwrap();
        let dt = 0.37;
        state.nonlinear_step(dt);
        let expect = Complex::new(0.8, 0.0) * cis(-0.64 * dt);
        for z in state.samples() {
            assert!((z - expect).norm() < 1e-14);
        }
        let mut foc = NLSField::from_spectrum(&plane_wave(0.8, (0, 0)), 1, Sign::Focusing).unwrap();
        foc.nonlinear_step(dt);
        let expect_foc = Complex::new(0.8, 0.0) * cis(0.64 * dt);
        assert!((foc.samples()[0] - expect_foc).norm() < 1e-14);

        let mut rnd = NLSField::from_spectrum(&smooth_data(2, 1.0), 4, Sign::Focusing).unwrap();
        let moduli: Vec<f64> = rnd.samples().iter().map(|z| z.norm()).collect();
        rnd.nonlinear_step(1.7);
        for (z, m) in rnd.samples().iter().zip(moduli) {
            assert!((z.norm() - m).abs() <= 1e-15 * (1.0 + m));
        }
    }

    #[test]
    fn plane_wave_is_solved_exactly() {
        for sign in [Sign::Defocusing, Sign::Focusing] {
            let a = 0.7;
            let xi = (1i64, 0i64);
            let f = plane_wave(a, xi);
            let mut state = NLSField::from_spectrum(&f, 2, sign).unwrap();
            let (t_final, dt) = (1.0, 1e-3);
            for _ in 0..1000 {
                state.strang_step(dt).unwrap();
            }
            let omega = 1.0 + sign.factor::<f64>() * a * a;
            let n = state.n_x();
            for i in 0..n {
                for j in 0..n {
                    let x1 = TAU * i as f64 / n as f64;
                    let expect = a * cis(x1 - omega * t_final);
                    let got = state.samples()[i * n + j];
                    assert!((got - expect).norm() < 1e-6, "sign {sign}: {got} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn splitting_is_second_order() {
        let f = smooth_data(3, 0.8);
        let order = measured_order(&f, 4, Sign::Defocusing, 0.5, 0.02).unwrap();
        assert!(
            (order - 2.0).abs() <= 0.1,
            "measured order {order} outside 2.0 ± 0.1"
        );
    }

    #[test]
    fn mass_is_conserved_along_long_trajectories() {
        let f = smooth_data(4, 0.6);
        let mut state = NLSField::from_spectrum(&f, 4, Sign::Defocusing).unwrap();
        let m0 = state.mass();
        for _ in 0..2000 {
            state.strang_step(1e-3).unwrap();
        }
        // Same per-step budget as the 1e−12-over-10⁴-steps requirement.
        assert!((state.mass() - m0).abs() <= 2e-13 * m0);
    }

    #[test]
    fn hamiltonian_drifts_below_tolerance_for_small_data() {
        for sign in [Sign::Defocusing, Sign::Focusing] {
            let f = smooth_data(5, 0.2);
            let mut state = NLSField::from_spectrum(&f, 4, sign).unwrap();
            let h0 = state.hamiltonian();
            for _ in 0..2000 {
                state.strang_step(5e-4).unwrap();
            }
            let h1 = state.hamiltonian();
            assert!((h1 - h0).abs() <= 1e-6 * h0.abs(), "{sign}: {h0} → {h1}");
        }
    }

    #[test]
    fn gauge_rotation_commutes_with_the_flow() {
        let f = smooth_data(6, 0.5);
        let mut rotated = WeightedSpectrum::new();
        let phase = cis(0.9f64);
        for (p, amp) in f.iter() {
            rotated.set(p, amp * phase);
        }
        let mut a = NLSField::from_spectrum(&f, 4, Sign::Defocusing).unwrap();
        let mut b = NLSField::from_spectrum(&rotated, 4, Sign::Defocusing).unwrap();
        for _ in 0..20 {
            a.strang_step(1e-2).unwrap();
            b.strang_step(1e-2).unwrap();
        }
        let scale: f64 = a.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x.norm() - y.norm()).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn stepping_forward_then_backward_returns_the_state() {
        let f = smooth_data(7, 0.7);
        let mut state = NLSField::from_spectrum(&f, 4, Sign::Focusing).unwrap();
        let start = state.samples().to_vec();
        for _ in 0..50 {
            state.strang_step(5e-3).unwrap();
        }
        for _ in 0..50 {
            state.strang_step(-5e-3).unwrap();
        }
        let scale = f.l2_norm();
        for (x, y) in state.samples().iter().zip(&start) {
            assert!((x - y).norm() <= 1e-10 * scale);
        }
        assert!(state.time().abs() < 1e-12);
    }

    #[test]
    fn sobolev_norm_matches_the_oracle_and_the_pinned_values() {
        let delta0 = plane_wave(1.0, (0, 0));
        let state0 = NLSField::from_spectrum(&delta0, 1, Sign::Defocusing).unwrap();
        for s in [0.1, 0.4, 1.0] {
            assert!((state0.sobolev_norm(s).unwrap() - TAU).abs() < 1e-12);
        }
        let delta1 = plane_wave(1.0, (1, 0));
        let state1 = NLSField::from_spectrum(&delta1, 1, Sign::Defocusing).unwrap();
        let expect = TAU * 2f64.sqrt();
        assert!((state1.sobolev_norm(1.0).unwrap() - expect).abs() < 1e-12);
        assert!((sobolev_norm_of(&delta1, 1.0).unwrap() - expect).abs() < 1e-15);

        let f = smooth_data(8, 1.3);
        let state = NLSField::from_spectrum(&f, 4, Sign::Defocusing).unwrap();
        let mut prev = 0.0;
        for s in [0.2, 0.5, 0.8, 1.0] {
            let grid = state.sobolev_norm(s).unwrap();
            let direct = sobolev_norm_of(&f, s).unwrap();
            assert!((grid - direct).abs() <= 1e-12 * direct);
            assert!(grid >= prev);
            prev = grid;
        }
        assert!(state.sobolev_norm(0.0).is_err());
        assert!(state.sobolev_norm(1.5).is_err());
    }

    #[test]
    fn zero_data_window_experiment_is_flat() {
        let rep = window_growth_experiment(
            &WeightedSpectrum::<f64>::new(),
            4,
            Sign::Defocusing,
            0.4,
            0.05,
            1e-2,
            3,
            2,
            usize::MAX,
        )
        .unwrap();
        assert_eq!(rep.k_obs, 1.0);
        assert!(rep.factors.iter().all(|&g| g == 1.0));
        for row in &rep.rows {
            assert_eq!(row.mass, 0.0);
            assert_eq!(row.hs_norm, 0.0);
        }
    }

    #[test]
    fn linear_regime_growth_factors_are_one() {
        let f = smooth_data(9, 1.0);
        let rep = window_growth_experiment(
            &f,
            4,
            Sign::Defocusing,
            0.4,
            1e-6,
            1e-2,
            3,
            2,
            usize::MAX,
        )
        .unwrap();
        for g in &rep.factors {
            assert!((g - 1.0).abs() <= 1e-8, "factor {g} off unity");
        }
    }

    #[test]
    fn window_report_bookkeeping_holds_together() {
        let f = smooth_data(10, 1.0);
        let rep = window_growth_experiment(
            &f,
            4,
            Sign::Defocusing,
            0.4,
            0.05,
            5e-3,
            4,
            2,
            25,
        )
        .unwrap();
        assert_eq!(rep.window_lengths.len(), 4);
        assert_eq!(rep.factors.len(), 4);
        for (j, tau) in rep.window_lengths.iter().enumerate() {
            let n_j = 4 * 2i64.pow(j as u32);
            let expect = 1.0 / (2.0 * (n_j as f64).ln().max(1.0));
            assert!((tau - expect).abs() < 1e-15);
        }
        let sum: f64 = rep.window_lengths.iter().sum();
        assert!((rep.total_time - sum).abs() < 1e-14);
        let max = rep.factors.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(rep.k_obs, max);
        assert!(rep.factors.iter().all(|&g| g > 0.0));

        let mass0 = rep.rows[0].mass;
        assert!((mass0 - (0.05f64).powi(2)).abs() <= 1e-12);
        for row in &rep.rows {
            assert!((row.mass - mass0).abs() <= 1e-12 * mass0);
        }
        let last_t = rep.rows.last().unwrap().t;
        assert!((last_t - rep.total_time).abs() <= 1e-12);

        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,mass,hamiltonian,hs_norm,window_index,growth_factor"
        );
        assert_eq!(lines.count(), rep.rows.len());
    }

    #[test]
    fn integrate_records_and_advances() {
        let f = smooth_data(11, 0.5);
        let mut state = NLSField::from_spectrum(&f, 4, Sign::Defocusing).unwrap();
        let rows = integrate(&mut state, 0.1, 1e-2, 0.4, 4).unwrap();
        assert!((state.time() - 0.1).abs() < 1e-14);
        assert_eq!(rows.first().unwrap().t, 0.0);
        assert!((rows.last().unwrap().t - 0.1).abs() < 1e-14);
        assert!(rows.iter().all(|r| r.window_index == 0));
        assert!(rows.len() >= 3);
        assert!(integrate(&mut state, 0.05, 1e-2, 0.4, 1).is_err());
        assert!(integrate(&mut state, 0.2, -1e-2, 0.4, 1).is_err());
    }
}
