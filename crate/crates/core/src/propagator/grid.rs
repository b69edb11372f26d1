//! Physical-space sampling of spectra on uniform torus grids.
//!
//! A spectrum synthesizes to `u(x) = Σ_ξ f(ξ) e^{iξ·x}` sampled at the
//! `n_x × n_x` nodes `x = 2π(i, j)/n_x`. For odd `n_x ≥ 2·max|ξ|_∞ + 1`
//! the frequencies occupy distinct residues mod `n_x`, so synthesis is an
//! unnormalized inverse 2-D DFT and analysis recovers `f` exactly. An
//! equal-weight node average integrates a trigonometric polynomial exactly
//! as long as none of its nonzero frequencies is divisible by `n_x`; the
//! quartic density `|u|⁴` has per-axis frequencies in
//! `[−4·max|ξ|_∞, 4·max|ξ|_∞]`, hence needs `n_x ≥ 4·max|ξ|_∞ + 1`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{CoreError, Result};
use crate::lattice::FreqPoint;
use crate::numeric::NeumaierSum;
use crate::scalar::{cis, Scalar};
use crate::spectrum::WeightedSpectrum;

/// Complex field values at the nodes `x = 2π·(i, j)/n_x`, stored row-major
/// with the first index along the first coordinate.
#[derive(Clone, Debug)]
pub struct PhysicalGrid<T: Scalar> {
    n_x: usize,
    samples: Vec<Complex<T>>,
}

/// Smallest admissible grid for synthesizing `f`: odd, `≥ 2·max|ξ|_∞ + 1`.
pub fn synthesis_grid_size<T: Scalar>(f: &WeightedSpectrum<T>) -> usize {
    2 * f.max_abs_coord() as usize + 1
}

/// Smallest grid on which the node average of `|u|⁴` is exact:
/// `4·max|ξ|_∞ + 1` (odd by construction).
pub fn quartic_grid_size<T: Scalar>(f: &WeightedSpectrum<T>) -> usize {
    4 * f.max_abs_coord() as usize + 1
}

fn check_grid<T: Scalar>(f: &WeightedSpectrum<T>, n_x: usize) -> Result<()> {
    if n_x == 0 || n_x % 2 == 0 {
        return Err(CoreError::validation(format!(
            "grid size must be odd and positive, got {n_x}"
        )));
    }
    let need = synthesis_grid_size(f);
    if n_x < need {
        return Err(CoreError::validation(format!(
            "grid of {n_x} points per axis aliases frequencies up to {}: need at least {need}",
            f.max_abs_coord()
        )));
    }
    Ok(())
}

/// Flat buffer slot of frequency `p` on an `n × n` grid.
pub(crate) fn grid_slot(p: FreqPoint, n: usize) -> usize {
    let ix = p.x.rem_euclid(n as i64) as usize;
    let iy = p.y.rem_euclid(n as i64) as usize;
    ix * n + iy
}

pub(crate) fn plan<T: Scalar>(n: usize, direction: FftDirection) -> Arc<dyn Fft<T>> {
    FftPlanner::new().plan_fft(n, direction)
}

fn transpose_square<T: Copy>(buf: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// In-place unnormalized 2-D DFT of an `n × n` row-major buffer, one 1-D
/// pass per axis. `scratch` is grown on demand and may be reused across
/// calls.
pub(crate) fn dft_2d<T: Scalar>(
    fft: &Arc<dyn Fft<T>>,
    buf: &mut [Complex<T>],
    n: usize,
    scratch: &mut Vec<Complex<T>>,
) {
    debug_assert_eq!(buf.len(), n * n);
    scratch.resize(fft.get_inplace_scratch_len(), Complex::new(T::zero(), T::zero()));
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, scratch);
    }
    transpose_square(buf, n);
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, scratch);
    }
    transpose_square(buf, n);
}

/// Samples `u(x) = Σ f(ξ)e^{iξ·x}` on the `n_x × n_x` grid via FFT.
///
/// Errors when `n_x` is even or small enough to alias the support.
pub fn sample_physical<T: Scalar>(f: &WeightedSpectrum<T>, n_x: usize) -> Result<PhysicalGrid<T>> {
    check_grid(f, n_x)?;
    let fft = plan::<T>(n_x, FftDirection::Inverse);
    let mut samples = vec![Complex::new(T::zero(), T::zero()); n_x * n_x];
    for (p, amp) in f.iter() {
        samples[grid_slot(p, n_x)] = amp;
    }
    let mut scratch = Vec::new();
    dft_2d(&fft, &mut samples, n_x, &mut scratch);
    Ok(PhysicalGrid { n_x, samples })
}

/// Direct-summation synthesis, `O(n_x²·#supp)` — the correctness oracle for
/// the FFT path.
pub fn sample_physical_direct<T: Scalar>(
    f: &WeightedSpectrum<T>,
    n_x: usize,
) -> Result<PhysicalGrid<T>> {
    check_grid(f, n_x)?;
    let entries: Vec<(FreqPoint, Complex<T>)> = f.iter().collect();
    let step = T::two_pi() / T::from_f64c(n_x as f64);
    let mut samples = Vec::with_capacity(n_x * n_x);
    for i in 0..n_x {
        let x1 = step * T::from_f64c(i as f64);
        for j in 0..n_x {
            let x2 = step * T::from_f64c(j as f64);
            let mut re = NeumaierSum::new();
            let mut im = NeumaierSum::new();
            for &(p, amp) in &entries {
                let z = amp * cis(T::from_i64c(p.x) * x1 + T::from_i64c(p.y) * x2);
                re.add(z.re);
                im.add(z.im);
            }
            samples.push(Complex::new(re.value(), im.value()));
        }
    }
    Ok(PhysicalGrid { n_x, samples })
}

impl<T: Scalar> PhysicalGrid<T> {
    pub(crate) fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    /// Field value at the node `x = 2π·(i, j)/n_x`.
    pub fn value(&self, i: usize, j: usize) -> Complex<T> {
        self.samples[i * self.n_x + j]
    }

    /// Coordinates of the node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> (T, T) {
        let step = T::two_pi() / T::from_f64c(self.n_x as f64);
        (step * T::from_f64c(i as f64), step * T::from_f64c(j as f64))
    }

    /// Node average of `|u|²` — equals `Σ|f(ξ)|²` whenever the grid
    /// resolves the support.
    pub fn mean_abs2(&self) -> T {
        let mut acc = NeumaierSum::new();
        for z in &self.samples {
            acc.add(z.norm_sqr());
        }
        acc.value() / T::from_f64c((self.n_x * self.n_x) as f64)
    }

    /// Node average of `|u|⁴` — exact for `n_x ≥ 4·max|ξ|_∞ + 1`.
    pub fn mean_abs4(&self) -> T {
        let mut acc = NeumaierSum::new();
        for z in &self.samples {
            let r = z.norm_sqr();
            acc.add(r * r);
        }
        acc.value() / T::from_f64c((self.n_x * self.n_x) as f64)
    }

    /// `∫_{T²} |u|² dx = (2π)² ·` mean of `|u|²`.
    pub fn integral_abs2(&self) -> T {
        let tp = T::two_pi();
        tp * tp * self.mean_abs2()
    }

    /// `∫_{T²} |u|⁴ dx = (2π)² ·` mean of `|u|⁴`.
    pub fn integral_abs4(&self) -> T {
        let tp = T::two_pi();
        tp * tp * self.mean_abs4()
    }

    /// Forward DFT divided by `n_x²`: the coefficients of `u` on the
    /// centered residue square `[−(n_x−1)/2, (n_x−1)/2]²`. Exact zeros are
    /// dropped; rounding noise at unused frequencies is kept, so callers
    /// see precisely what the transform produced.
    pub fn analyze(&self) -> WeightedSpectrum<T> {
        let n = self.n_x;
        let fft = plan::<T>(n, FftDirection::Forward);
        let mut buf = self.samples.clone();
        let mut scratch = Vec::new();
        dft_2d(&fft, &mut buf, n, &mut scratch);
        let inv = T::one() / T::from_f64c((n * n) as f64);
        let half = (n as i64 - 1) / 2;
        let mut f = WeightedSpectrum::new();
        for ix in 0..n {
            for iy in 0..n {
                let amp = buf[ix * n + iy] * inv;
                if amp.re == T::zero() && amp.im == T::zero() {
                    continue;
                }
                let lift = |m: usize| {
                    let m = m as i64;
                    if m > half {
                        m - n as i64
                    } else {
                        m
                    }
                };
                f.set(FreqPoint::new(lift(ix), lift(iy)).expect("residue in bounds"), amp);
            }
        }
        f
    }
}
