//! Frequency lattice points on the 2-torus.
//!
//! A [`FreqPoint`] is a point of `Z^2`, the Fourier lattice of
//! `T^2 = (R/2πZ)^2`. Coordinates are capped at `2^30` in absolute value so
//! that every squared norm, dot product and resonance phase computed here
//! fits its integer type with room to spare (the phases are evaluated
//! through 128-bit intermediates).

use crate::error::{CoreError, Result};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Largest allowed coordinate magnitude.
pub const COORD_BOUND: i64 = 1 << 30;

/// A point `ξ = (x, y)` of the frequency lattice `Z^2`.
///
/// Ordering is lexicographic in `(x, y)`; this is the canonical order used
/// everywhere a deterministic enumeration is required.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct FreqPoint {
    pub x: i64,
    pub y: i64,
}

impl FreqPoint {
    /// Checked constructor; rejects coordinates beyond [`COORD_BOUND`].
    pub fn new(x: i64, y: i64) -> Result<Self> {
        if x.abs() > COORD_BOUND || y.abs() > COORD_BOUND {
            return Err(CoreError::validation(format!(
                "frequency ({x}, {y}) outside coordinate bound ±{COORD_BOUND}"
            )));
        }
        Ok(Self { x, y })
    }

    /// Counter-clockwise rotation by 90°: `(x, y) -> (-y, x)`.
    pub fn perp(self) -> Self {
        Self {
            x: -self.y,
            y: self.x,
        }
    }

    /// `gcd(|x|, |y|)` with `gcd(a, 0) = |a|`; rejects the origin, whose
    /// direction is undefined.
    pub fn gcd(self) -> Result<i64> {
        if self.x == 0 && self.y == 0 {
            return Err(CoreError::validation(
                "gcd of the zero frequency is undefined",
            ));
        }
        Ok(self.x.abs().gcd(&self.y.abs()))
    }

    /// Squared Euclidean norm `|ξ|^2 = x^2 + y^2`, the Laplacian eigenvalue
    /// of the mode `e^{iξ·x}` (up to sign). Never overflows for valid points.
    pub fn norm_sq(self) -> i64 {
        self.x * self.x + self.y * self.y
    }

    /// Dot product with another valid point. Never overflows.
    pub fn dot(self, other: Self) -> i64 {
        self.x * other.x + self.y * other.y
    }

    /// Difference as a raw vector; components may exceed the coordinate
    /// bound, so this intentionally does not return a `FreqPoint`.
    pub fn sub(self, other: Self) -> (i64, i64) {
        (self.x - other.x, self.y - other.y)
    }

    /// `∞`-norm of the point, used for grid sizing.
    pub fn max_abs_coord(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }
}

impl std::fmt::Display for FreqPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Convenience constructor for in-crate use and tests.
pub fn fp(x: i64, y: i64) -> FreqPoint {
    FreqPoint::new(x, y).expect("coordinates within bound")
}

// ---- raw difference-vector helpers -------------------------------------
//
// Differences of two valid points have components up to 2^31, so products
// are taken in i128.

/// Dot product of two difference vectors in 128-bit arithmetic.
pub(crate) fn vec_dot_i128(a: (i64, i64), b: (i64, i64)) -> i128 {
    a.0 as i128 * b.0 as i128 + a.1 as i128 * b.1 as i128
}

/// `(x, y) -> (-y, x)` on a raw vector.
pub(crate) fn vec_perp(v: (i64, i64)) -> (i64, i64) {
    (-v.1, v.0)
}

/// gcd of a nonzero raw vector.
pub(crate) fn vec_gcd(v: (i64, i64)) -> i64 {
    debug_assert!(v != (0, 0));
    v.0.abs().gcd(&v.1.abs())
}

/// Reduces a nonzero vector to its primitive, sign-normalized direction:
/// divided by the gcd and flipped so that `x > 0`, or `x = 0 && y > 0`.
/// Antiparallel vectors map to the same direction, so a line's direction
/// key does not depend on which two of its points produced it.
pub(crate) fn normalize_direction(v: (i64, i64)) -> (i64, i64) {
    let g = vec_gcd(v);
    let mut d = (v.0 / g, v.1 / g);
    if d.0 < 0 || (d.0 == 0 && d.1 < 0) {
        d = (-d.0, -d.1);
    }
    d
}
