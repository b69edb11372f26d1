//! Closed-form quadruple counting on product boxes.
//!
//! On a box `B = [x₀, x₁] × [y₀, y₁]` the vertex walk collapses by
//! translation invariance. Parameterize a quadruple by its first vertex and
//! the difference vectors `u = ξ₂ − ξ₁`, `w = ξ₄ − ξ₁` (so `ξ₃ = ξ₁+u+w`
//! and `σ = 2u·w`). The number of admissible first vertices is the product
//! of one-dimensional overlaps
//!
//! ```text
//! #{ξ₁ : all four vertices ∈ B} = ∏_d max(0, L_d − |u_d| − |w_d|),
//! ```
//!
//! `L_d` the side lengths, because along each axis the four offsets
//! `{0, u_d, w_d, u_d+w_d}` span exactly `|u_d| + |w_d|`.
//!
//! Rectangle counting ([`rectangle_count_box`]) needs `u·w = 0` only: the
//! degenerate classes `u = 0` or `w = 0` contribute `2n² − n` outright, and
//! for each `u ≠ 0` the orthogonal mates are the multiples of the primitive
//! `perp(u)/gcd(u)`, walked until the overlap dies. This is what makes
//! full-period scans on `[−N, N]²` feasible far beyond the generic cap.
//! The full τ-histogram ([`tau_histogram_box`]) walks all `(u, w)` classes.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::lattice::{vec_gcd, FreqPoint, COORD_BOUND};
use crate::pointset::PointSet;
use crate::quadruple::histogram::TauHistogram;
use crate::scalar::Scalar;

/// An axis-aligned product box of lattice points, bounds inclusive.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    x_min: i64,
    x_max: i64,
    y_min: i64,
    y_max: i64,
}

/// Cap on the number of difference vectors walked by the rectangle counter.
const RECT_WORK_CAP: u128 = 1 << 28;

/// Cap on the number of `(u, w)` classes walked by the histogram builder.
const HIST_WORK_CAP: u128 = 1 << 30;

/// Cap on points materialized by [`LatticeBox::point_set`].
const MATERIALIZE_CAP: u128 = 1 << 22;

impl LatticeBox {
    pub fn new(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Result<Self> {
        if x_min > x_max || y_min > y_max {
            return Err(CoreError::validation(format!(
                "empty box [{x_min}, {x_max}] × [{y_min}, {y_max}]"
            )));
        }
        for c in [x_min, x_max, y_min, y_max] {
            if c.abs() > COORD_BOUND {
                return Err(CoreError::validation(format!(
                    "box bound {c} outside coordinate bound ±{COORD_BOUND}"
                )));
            }
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// The square `[−n, n]²`.
    pub fn centered(n: i64) -> Result<Self> {
        if n < 0 {
            return Err(CoreError::validation(format!(
                "centered box needs n ≥ 0, got {n}"
            )));
        }
        Self::new(-n, n, -n, n)
    }

    pub fn len_x(&self) -> i64 {
        self.x_max - self.x_min + 1
    }

    pub fn len_y(&self) -> i64 {
        self.y_max - self.y_min + 1
    }

    pub fn point_count(&self) -> u128 {
        self.len_x() as u128 * self.len_y() as u128
    }

    pub fn contains(&self, p: FreqPoint) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Materializes the box as an indexed point set (for cross-checks
    /// against the generic backend).
    pub fn point_set(&self) -> Result<PointSet> {
        if self.point_count() > MATERIALIZE_CAP {
            return Err(CoreError::CapExceeded {
                what: "box materialization point count",
                limit: MATERIALIZE_CAP as u64,
                got: self.point_count().min(u64::MAX as u128) as u64,
            });
        }
        let mut points = Vec::with_capacity(self.point_count() as usize);
        for x in self.x_min..=self.x_max {
            for y in self.y_min..=self.y_max {
                points.push(FreqPoint { x, y });
            }
        }
        // x-major, y-minor generation is already lexicographic.
        Ok(PointSet::from_sorted(points))
    }
}

/// Exact number of rectangles (σ = 0 quadruples) with all vertices in the
/// box, in closed form per difference class. Agrees with the σ = 0 bin of
/// the generic backend integer for integer.
pub fn rectangle_count_box(b: &LatticeBox) -> Result<u128> {
    let lx = b.len_x();
    let ly = b.len_y();
    let classes = (2 * lx as u128 - 1) * (2 * ly as u128 - 1);
    if classes > RECT_WORK_CAP {
        return Err(CoreError::CapExceeded {
            what: "grid-fast difference classes",
            limit: RECT_WORK_CAP as u64,
            got: classes.min(u64::MAX as u128) as u64,
        });
    }
    let n = b.point_count();
    // u = 0 (ξ₂ = ξ₁, ξ₃ = ξ₄ free) and w = 0 (ξ₄ = ξ₁, ξ₃ = ξ₂ free)
    // give n² each, overlapping in the n fully degenerate quadruples.
    let mut total = 2 * n * n - n;
    for ux in -(lx - 1)..=(lx - 1) {
        for uy in -(ly - 1)..=(ly - 1) {
            if ux == 0 && uy == 0 {
                continue;
            }
            let g = vec_gcd((ux, uy));
            let (px, py) = (-uy / g, ux / g);
            let mut k = 1i64;
            loop {
                let ox = lx - ux.abs() - (k * px).abs();
                let oy = ly - uy.abs() - (k * py).abs();
                if ox <= 0 || oy <= 0 {
                    break;
                }
                // w = ±k·(px, py) give mirror-image rectangles.
                total += 2 * ox as u128 * oy as u128;
                k += 1;
            }
        }
    }
    Ok(total)
}

/// Exact τ-histogram of all quadruples of the box, walking `(u, w)`
/// difference classes instead of vertices. Weighted sums equal counts
/// (`f = χ_B`).
pub fn tau_histogram_box<T: Scalar>(b: &LatticeBox) -> Result<TauHistogram<T>> {
    let lx = b.len_x();
    let ly = b.len_y();
    let classes = (2 * lx as u128 - 1) * (2 * ly as u128 - 1);
    let work = classes.checked_mul(classes).unwrap_or(u128::MAX);
    if work > HIST_WORK_CAP {
        return Err(CoreError::CapExceeded {
            what: "grid-fast (u, w) classes",
            limit: HIST_WORK_CAP as u64,
            got: work.min(u64::MAX as u128) as u64,
        });
    }
    // |σ|/2 = |u·w| ≤ (lx−1)² + (ly−1)², so a flat slot table usually
    // serves the whole range; huge thin boxes fall back to a tree map.
    let slot_bound = (lx as u128 - 1) * (lx as u128 - 1) + (ly as u128 - 1) * (ly as u128 - 1) + 1;
    let mut dense: Vec<u128> = if slot_bound <= 1 << 22 {
        vec![0; slot_bound as usize]
    } else {
        Vec::new()
    };
    let mut sparse: BTreeMap<u64, u128> = BTreeMap::new();
    for ux in -(lx - 1)..=(lx - 1) {
        for wx in -(lx - 1)..=(lx - 1) {
            let ox = lx - ux.abs() - wx.abs();
            if ox <= 0 {
                continue;
            }
            for uy in -(ly - 1)..=(ly - 1) {
                for wy in -(ly - 1)..=(ly - 1) {
                    let oy = ly - uy.abs() - wy.abs();
                    if oy <= 0 {
                        continue;
                    }
                    let half_sigma = ux as i128 * wx as i128 + uy as i128 * wy as i128;
                    let translates = ox as u128 * oy as u128;
                    if dense.is_empty() {
                        *sparse
                            .entry(2 * (half_sigma as i64).unsigned_abs())
                            .or_insert(0) += translates;
                    } else {
                        dense[half_sigma.unsigned_abs() as usize] += translates;
                    }
                }
            }
        }
    }
    if !dense.is_empty() {
        sparse = dense
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(i, c)| (2 * i as u64, c))
            .collect();
    }
    Ok(TauHistogram::from_raw_bins(
        sparse
            .into_iter()
            .map(|(tau, c)| (tau, (c, T::from_f64c(c as f64))))
            .collect(),
    ))
}
