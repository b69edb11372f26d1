//! Ordered additive quadruples ("parallelograms") and their exact
//! enumeration.
//!
//! A parallelogram is an ordered quadruple `Q = (ξ₁, ξ₂, ξ₃, ξ₄)` of
//! lattice points with `ξ₁ + ξ₃ = ξ₂ + ξ₄`. These are the only frequency
//! combinations that survive the spatial integral of `|u|⁴` for a free
//! Schrödinger evolution `u(t) = Σ_ξ f(ξ) e^{i(ξ·x − t|ξ|²)}` on the torus:
//!
//! ```text
//! ∫_{T²} |u(t)|⁴ dx = (2π)² Σ_Q f(ξ₁) f(ξ₂) f(ξ₃) f(ξ₄) e^{-it σ_Q},
//! ```
//!
//! for real `f ≥ 0`, where the resonance phase
//!
//! ```text
//! σ_Q = |ξ₁|² − |ξ₂|² + |ξ₃|² − |ξ₄|² = 2 (ξ₁−ξ₂)·(ξ₁−ξ₄)
//! ```
//!
//! is always an even integer. Quadruples with `σ_Q = 0` are *rectangles*
//! (the corner at `ξ₁` is a right angle); they carry the non-oscillatory
//! bulk of the integral. `τ_Q = |σ_Q|` indexes the oscillating shells, and
//! for `ξ₁ ≠ ξ₄` it is a multiple of `gcd(ξ₁−ξ₄)` because
//! `σ_Q = −2(ξ₁−ξ₄)·(ξ₃−ξ₄)` as well (`ξ₃−ξ₄ = ξ₂−ξ₁`).
//!
//! The generic backend here walks `(ξ₁, ξ₂, ξ₄)` over an arbitrary finite
//! set and membership-tests `ξ₃ = ξ₂+ξ₄−ξ₁`; it is exact for any set but
//! cubic in the support size, hence capped. [`gridfast`] counts on product
//! boxes in closed form, [`histogram`] aggregates by `τ_Q`, and [`kernels`]
//! evaluates the time-integrated sums.

pub mod gridfast;
pub mod histogram;
pub mod kernels;

pub use gridfast::{rectangle_count_box, tau_histogram_box, LatticeBox};
pub use histogram::{TauBin, TauHistogram};
pub use kernels::{
    averaged_kernel, averaged_kernel_sum, dyadic_divisor_density, gcd_filtered_average,
    l4_time_integral, l4_time_integral_capped, l4_time_integral_interval, time_kernel,
    time_kernel_interval,
};

use std::collections::HashMap;

use crate::error::{CoreError, Result};
use crate::lattice::{vec_dot_i128, FreqPoint};
use crate::numeric::{par_sum_indexed, NeumaierSum};
use crate::pointset::{PointSet, WeightedSupport};
use crate::scalar::Scalar;

/// Default cap on the support size of the cubic-time generic backend.
pub const DEFAULT_ENUMERATION_CAP: usize = 4096;

/// `σ = 2 (ξ₁−ξ₂)·(ξ₁−ξ₄)` of a vertex triple. The product is formed in
/// 128 bits; for any quadruple whose four vertices satisfy the coordinate
/// bound, the per-axis spans obey `|d₂|+|d₄| ≤ 2^31`, so `|σ| ≤ 2^62` and
/// the result always fits an `i64`.
fn resonance_phase(x1: FreqPoint, x2: FreqPoint, x4: FreqPoint) -> i64 {
    let s = 2 * vec_dot_i128(x1.sub(x2), x1.sub(x4));
    debug_assert!(i64::try_from(s).is_ok());
    s as i64
}

/// An ordered quadruple `(ξ₁, ξ₂, ξ₃, ξ₄)` with `ξ₁ + ξ₃ = ξ₂ + ξ₄`,
/// carrying its signed resonance phase.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Parallelogram {
    vertices: [FreqPoint; 4],
    sigma: i64,
}

impl Parallelogram {
    /// Checked constructor; rejects vertex tuples violating the
    /// parallelogram relation.
    pub fn new(x1: FreqPoint, x2: FreqPoint, x3: FreqPoint, x4: FreqPoint) -> Result<Self> {
        if x1.x + x3.x != x2.x + x4.x || x1.y + x3.y != x2.y + x4.y {
            return Err(CoreError::validation(format!(
                "not a parallelogram: {x1} + {x3} ≠ {x2} + {x4}"
            )));
        }
        Ok(Self {
            vertices: [x1, x2, x3, x4],
            sigma: resonance_phase(x1, x2, x4),
        })
    }

    pub fn xi1(&self) -> FreqPoint {
        self.vertices[0]
    }

    pub fn xi2(&self) -> FreqPoint {
        self.vertices[1]
    }

    pub fn xi3(&self) -> FreqPoint {
        self.vertices[2]
    }

    pub fn xi4(&self) -> FreqPoint {
        self.vertices[3]
    }

    pub fn vertices(&self) -> [FreqPoint; 4] {
        self.vertices
    }

    /// Signed resonance phase `|ξ₁|² − |ξ₂|² + |ξ₃|² − |ξ₄|²`.
    pub fn sigma(&self) -> i64 {
        self.sigma
    }

    /// `τ = |σ|`.
    pub fn tau(&self) -> u64 {
        self.sigma.unsigned_abs()
    }

    /// A quadruple is a rectangle exactly when its phase vanishes.
    pub fn is_rectangle(&self) -> bool {
        self.sigma == 0
    }

    pub fn has_distinct_vertices(&self) -> bool {
        let v = &self.vertices;
        v[0] != v[1] && v[0] != v[2] && v[0] != v[3] && v[1] != v[2] && v[1] != v[3] && v[2] != v[3]
    }

    /// `gcd(ξ₁ − ξ₄)`, or `None` for `ξ₁ = ξ₄`. Divides `τ` whenever
    /// defined.
    pub fn side_gcd(&self) -> Option<i64> {
        let d = self.vertices[0].sub(self.vertices[3]);
        if d == (0, 0) {
            None
        } else {
            Some(crate::lattice::vec_gcd(d))
        }
    }

    /// The quadruple `(ξ₂, ξ₁, ξ₄, ξ₃)`: swapping the two diagonal pairs
    /// negates `σ`, which is why the `τ`-histogram is symmetric in sign.
    pub fn pair_swap(&self) -> Self {
        let [a, b, c, d] = self.vertices;
        Self {
            vertices: [b, a, d, c],
            sigma: -self.sigma,
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(CoreError::CapExceeded {
            what: "quadruple enumeration support size",
            limit: cap as u64,
            got: n as u64,
        });
    }
    Ok(())
}

/// Visits every parallelogram with vertices in `set`, each exactly once, in
/// lexicographic `(ξ₁, ξ₂, ξ₄)` order. Cubic in `set.len()`, hence `cap`.
pub fn visit_parallelograms<F>(set: &PointSet, cap: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&Parallelogram),
{
    check_cap(set.len(), cap)?;
    let pts = set.points();
    for &p1 in pts {
        for &p2 in pts {
            let d12 = p1.sub(p2);
            for &p4 in pts {
                let x3 = p2.x + p4.x - p1.x;
                let y3 = p2.y + p4.y - p1.y;
                if let Some(i3) = set.position(x3, y3) {
                    let s = 2 * vec_dot_i128(d12, p1.sub(p4));
                    visit(&Parallelogram {
                        vertices: [p1, p2, pts[i3 as usize], p4],
                        sigma: s as i64,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Total number of parallelograms in `set`, by direct enumeration. Agrees
/// with [`additive_energy`], which computes the same number quadratically.
pub fn count_parallelograms(set: &PointSet, cap: usize) -> Result<u128> {
    let mut n: u128 = 0;
    visit_parallelograms(set, cap, |_| n += 1)?;
    Ok(n)
}

/// Additive energy `Σ_η r(η)²` where `r(η) = #{(a, b) ∈ S²: a + b = η}`.
///
/// Every parallelogram is a pair of representations of its common vertex
/// sum, so this equals the total parallelogram count — an independent
/// quadratic-time oracle for the cubic enumeration. Memory is proportional
/// to the number of distinct pairwise sums.
pub fn additive_energy(set: &PointSet) -> u128 {
    let mut reps: HashMap<(i64, i64), u64> = HashMap::with_capacity(set.len() * 2);
    for a in set.points() {
        for b in set.points() {
            *reps.entry((a.x + b.x, a.y + b.y)).or_insert(0) += 1;
        }
    }
    reps.values().map(|&c| c as u128 * c as u128).sum()
}

/// `Σ_Q f(ξ₁)f(ξ₂)f(ξ₃)f(ξ₄) · kernel(σ_Q)` over all parallelograms of the
/// support of `f`.
///
/// Parallelized over the outer vertex `ξ₁`; each slice is accumulated with
/// compensated summation in enumeration order and the per-slice values are
/// combined in index order, so the result is bit-identical for every thread
/// count.
pub(crate) fn weighted_phase_sum<T, K>(ws: &WeightedSupport<T>, cap: usize, kernel: K) -> Result<T>
where
    T: Scalar,
    K: Fn(i64) -> T + Sync,
{
    let set = ws.set();
    check_cap(set.len(), cap)?;
    let pts = set.points();
    let w = ws.weights();
    Ok(par_sum_indexed(pts.len(), |i1| {
        let p1 = pts[i1];
        let w1 = w[i1];
        let mut acc = NeumaierSum::new();
        for (i2, &p2) in pts.iter().enumerate() {
            let d12 = p1.sub(p2);
            let w12 = w1 * w[i2];
            for (i4, &p4) in pts.iter().enumerate() {
                let x3 = p2.x + p4.x - p1.x;
                let y3 = p2.y + p4.y - p1.y;
                if let Some(i3) = set.position(x3, y3) {
                    let s = 2 * vec_dot_i128(d12, p1.sub(p4));
                    acc.add(w12 * w[i4] * w[i3 as usize] * kernel(s as i64));
                }
            }
        }
        acc.value()
    }))
}
