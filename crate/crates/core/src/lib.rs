//! Exact Strichartz functionals and incidence counting on the 2-torus.
//!
//! The crate computes the space-time quartic integral
//! `∫_0^T ∫_{T^2} |e^{itΔ} φ|^4 dx dt` of a frequency-truncated free
//! Schrödinger wave **exactly**, as a weighted sum over lattice
//! parallelograms `ξ_1 + ξ_3 = ξ_2 + ξ_4` with resonance phase
//! `σ = |ξ_1|^2 − |ξ_2|^2 + |ξ_3|^2 − |ξ_4|^2`, and independently by
//! high-order quadrature of the synthesized field. Around that identity it
//! implements the incidence-geometry toolkit that controls the counts —
//! rich lines, orthogonal-cross classification, exceptional-set
//! decomposition, binned rectangle estimates — and a split-step spectral
//! integrator for the cubic nonlinear Schrödinger equation with
//! logarithmic-length time windows.
//!
//! Floating-point code is generic over the [`scalar::Scalar`] width; the
//! aliases below fix `f64` for ordinary use. Counting code is exact integer
//! arithmetic throughout.

pub mod error;
pub mod incidence;
pub mod lattice;
pub mod levels;
pub mod nls;
pub mod numeric;
pub mod pointset;
pub mod propagator;
pub mod quadruple;
pub mod sampling;
pub mod scalar;
pub mod spectrum;

pub use error::{CoreError, Result};
pub use incidence::Line;
pub use lattice::{FreqPoint, COORD_BOUND};
pub use pointset::{PointSet, WeightedSupport};
pub use quadruple::Parallelogram;
pub use scalar::Scalar;

/// Default floating-point width.
pub type Real = f64;
/// Complex amplitude at the default width.
pub type Amplitude = num_complex::Complex<f64>;
/// Spectrum at the default width.
pub type Spectrum = spectrum::WeightedSpectrum<f64>;
/// Dyadic level family at the default width.
pub type Levels = levels::DyadicLevels<f64>;
