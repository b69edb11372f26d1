//! Floating-point scalar abstraction.
//!
//! All amplitude-carrying code (kernel sums, quadrature, propagation, the NLS
//! integrator) is generic over [`Scalar`] so that it runs in `f32` or `f64`.
//! The exact counting layer (lattice points, parallelogram enumeration,
//! incidence counts) is deliberately *not* generic: it works in `i64`/`i128`
//! and never touches floating point.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar used for amplitudes, kernels and field values.
///
/// Implemented by `f32` and `f64`. The `FftNum` bound lets the same generic
/// code drive the FFT backend for either width.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + std::iter::Sum
    + std::fmt::Display
    + std::fmt::LowerExp
    + std::fmt::Debug
    + rustfft::FftNum
{
    /// Lossy conversion from `f64`; panics only for values far outside the
    /// representable range (never for the constants used internally).
    fn from_f64c(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// Conversion from a lattice integer (`i64`). Large values lose the low
    /// bits exactly as `x as f64` would.
    fn from_i64c(x: i64) -> Self {
        Self::from_f64c(x as f64)
    }

    /// Two pi, the circumference of each torus direction.
    fn two_pi() -> Self {
        Self::PI() + Self::PI()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex amplitude over a [`Scalar`].
pub type CScalar<T> = Complex<T>;

/// `e^{i a}` for a real phase `a`.
pub fn cis<T: Scalar>(a: T) -> Complex<T> {
    let (s, c) = a.sin_cos();
    Complex::new(c, s)
}
