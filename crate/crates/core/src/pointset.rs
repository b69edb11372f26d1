//! Indexed finite lattice sets.
//!
//! Quadruple enumeration performs one membership probe per inner-loop step,
//! so the probe is the hottest instruction sequence in the crate. A
//! [`PointSet`] stores its points in lexicographic order together with a
//! positional index: a dense bounding-box table when the box is small
//! enough, a hash map otherwise. `position` returns the rank of the point
//! in the sorted order, which doubles as the index into parallel weight
//! arrays ([`WeightedSupport`]).

use std::collections::HashMap;

use crate::error::Result;
use crate::lattice::FreqPoint;
use crate::scalar::Scalar;
use crate::spectrum::WeightedSpectrum;

/// Largest bounding-box slot count served by the dense index
/// (4M slots ≈ 16 MiB of `u32`).
const DENSE_SLOT_CAP: i64 = 1 << 22;

const EMPTY_SLOT: u32 = u32::MAX;

enum Index {
    /// Offset table over the bounding box `[x0, x0+width) × [y0, y0+height)`.
    Dense {
        x0: i64,
        y0: i64,
        width: i64,
        height: i64,
        slots: Vec<u32>,
    },
    Sparse(HashMap<(i64, i64), u32>),
}

/// A finite set of lattice points in canonical (lexicographic) order with a
/// constant-time membership index.
pub struct PointSet {
    points: Vec<FreqPoint>,
    index: Index,
}

impl PointSet {
    /// Builds a set from arbitrary points; duplicates are collapsed.
    pub fn new(mut points: Vec<FreqPoint>) -> Self {
        points.sort_unstable();
        points.dedup();
        Self::from_sorted(points)
    }

    /// Builds the set of support points of a spectrum (already sorted and
    /// duplicate-free by construction).
    pub fn from_spectrum<T: Scalar>(f: &WeightedSpectrum<T>) -> Self {
        Self::from_sorted(f.support().collect())
    }

    pub(crate) fn from_sorted(points: Vec<FreqPoint>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        assert!(
            points.len() < EMPTY_SLOT as usize,
            "point set too large to index"
        );
        let index = Self::build_index(&points);
        Self { points, index }
    }

    fn build_index(points: &[FreqPoint]) -> Index {
        if let Some(&first) = points.first() {
            let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
            for p in points {
                x0 = x0.min(p.x);
                x1 = x1.max(p.x);
                y0 = y0.min(p.y);
                y1 = y1.max(p.y);
            }
            let width = x1 - x0 + 1;
            let height = y1 - y0 + 1;
            // Coordinates are bounded by 2^30, so width·height ≤ 2^62 never
            // overflows i64.
            if width * height <= DENSE_SLOT_CAP {
                let mut slots = vec![EMPTY_SLOT; (width * height) as usize];
                for (i, p) in points.iter().enumerate() {
                    slots[((p.x - x0) * height + (p.y - y0)) as usize] = i as u32;
                }
                return Index::Dense {
                    x0,
                    y0,
                    width,
                    height,
                    slots,
                };
            }
        }
        Index::Sparse(
            points
                .iter()
                .enumerate()
                .map(|(i, p)| ((p.x, p.y), i as u32))
                .collect(),
        )
    }

    /// Rank of `(x, y)` in the sorted point list, if present. Accepts raw
    /// coordinates so callers can probe sums/differences that may fall
    /// outside the `FreqPoint` coordinate bound.
    #[inline]
    pub fn position(&self, x: i64, y: i64) -> Option<u32> {
        match &self.index {
            Index::Dense {
                x0,
                y0,
                width,
                height,
                slots,
            } => {
                let dx = x - x0;
                let dy = y - y0;
                if dx < 0 || dx >= *width || dy < 0 || dy >= *height {
                    return None;
                }
                match slots[(dx * height + dy) as usize] {
                    EMPTY_SLOT => None,
                    i => Some(i),
                }
            }
            Index::Sparse(map) => map.get(&(x, y)).copied(),
        }
    }

    #[inline]
    pub fn contains(&self, p: FreqPoint) -> bool {
        self.position(p.x, p.y).is_some()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The points in lexicographic order.
    pub fn points(&self) -> &[FreqPoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = FreqPoint> + '_ {
        self.points.iter().copied()
    }

    /// Largest `|ξ|^2` over the set; 0 for the empty set.
    pub fn max_norm_sq(&self) -> i64 {
        self.points.iter().map(|p| p.norm_sq()).max().unwrap_or(0)
    }
}

/// A nonnegative real weight function riding along a [`PointSet`]:
/// `weights()[i]` is the weight of `set().points()[i]`.
pub struct WeightedSupport<T> {
    set: PointSet,
    weights: Vec<T>,
}

impl<T: Scalar> WeightedSupport<T> {
    /// Extracts the support and weights of a spectrum, rejecting entries
    /// with nonzero imaginary part or negative real part (the weighted
    /// counting identities hold for nonnegative `f` only).
    pub fn from_spectrum(f: &WeightedSpectrum<T>) -> Result<Self> {
        let entries = f.nonnegative_entries()?;
        let points = entries.iter().map(|&(p, _)| p).collect();
        let weights = entries.into_iter().map(|(_, w)| w).collect();
        Ok(Self {
            set: PointSet::from_sorted(points),
            weights,
        })
    }

    pub fn set(&self) -> &PointSet {
        &self.set
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}
