//! Small numerical utilities: compensated summation, deterministic parallel
//! reduction, clamped logarithms and lossless float formatting.

use crate::scalar::Scalar;
use rayon::prelude::*;

/// Neumaier-compensated accumulator.
///
/// Sums in a *fixed* order are reproducible bit-for-bit across runs; the
/// compensation keeps the error near one ulp of the true sum even when terms
/// cancel. All weighted reductions that feed reported numbers go through
/// this type.
#[derive(Clone, Copy, Debug)]
pub struct NeumaierSum<T: Scalar> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> Default for NeumaierSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }
}

impl<T: Scalar> NeumaierSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

/// Sums a slice in index order with compensation.
pub fn compensated_sum<T: Scalar>(xs: &[T]) -> T {
    let mut acc = NeumaierSum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Maps `f` over `0..n` in parallel and combines the results *in index
/// order* with compensated summation.
///
/// The partial results are materialized per index, so the value is
/// independent of the number of worker threads — this is the reduction
/// contract every scan in the crate relies on.
pub fn par_sum_indexed<T, F>(n: usize, f: F) -> T
where
    T: Scalar + Send + Sync,
    F: Fn(usize) -> T + Send + Sync,
{
    let parts: Vec<T> = (0..n).into_par_iter().map(f).collect();
    compensated_sum(&parts)
}

/// `log x := max{1, ln x}` — the clamped logarithm used for window lengths
/// and for normalizing fourth-power ratios. Defined (and equal to 1) for all
/// `x <= e`, including zero and negative arguments.
pub fn log_clamped<T: Scalar>(x: T) -> T {
    let l = x.ln();
    if l.is_nan() || l < T::one() {
        T::one()
    } else {
        l
    }
}

/// Formats a float with 17 significant digits (scientific notation), enough
/// for a lossless `f64` round-trip. All CSV output uses this.
pub fn fmt_float<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x)
}
