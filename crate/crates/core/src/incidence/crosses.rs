//! Orthogonal line pairs through level points, classified by richness.
//!
//! A cross is a triple `(ξ, ℓ₁, ℓ₂)` of mutually orthogonal lattice lines
//! meeting at a point `ξ` of a dyadic level family. With `j` the level
//! holding `ξ` and `a = log₂ max{#(ℓ₁ ∩ S_j), #(ℓ₂ ∩ S_j)}`, the cross is
//!
//! * [`CrossClass::Rich`]     when `a ≥ j/2 + C`,
//! * [`CrossClass::Moderate`] when `1 ≤ a < j/2 + C`,
//! * [`CrossClass::Isolated`] when `a = 0`, i.e. both lines meet `S_j` in
//!   `ξ` alone.
//!
//! Since `ξ` itself lies on both lines, the counts are positive integers
//! and `a ∈ {0} ∪ [1, ∞)`; with `C ≥ 1` (enforced by the level builder) the
//! three classes are disjoint and exhaustive. The infinitely many crosses
//! through a point are cut down to the realizable ones: directions from `ξ`
//! to other points of the family (any right-angled parallelogram corner at
//! `ξ` uses such a direction for at least one of its edges) plus the
//! axis-aligned probe, so every point carries at least one cross.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::lattice::{normalize_direction, vec_perp, FreqPoint};
use crate::levels::DyadicLevels;
use crate::pointset::PointSet;
use crate::scalar::Scalar;

use super::lines::{collect_lines, Line};
use super::meets_richness_threshold;

/// Richness class of a cross.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CrossClass {
    /// `a ≥ j/2 + C`: at least one arm is rich in the point's level.
    Rich,
    /// `1 ≤ a < j/2 + C`: an arm holds another level point, none is rich.
    Moderate,
    /// `a = 0`: both arms meet the level only in the point itself.
    Isolated,
}

impl CrossClass {
    /// Conventional numeric label: rich 1, moderate 2, isolated 3.
    pub fn index(self) -> u8 {
        match self {
            CrossClass::Rich => 1,
            CrossClass::Moderate => 2,
            CrossClass::Isolated => 3,
        }
    }
}

/// Classifies from the two arm counts, exactly in integers.
pub(crate) fn classify_counts(count1: u64, count2: u64, j: usize, c: u32) -> CrossClass {
    let max = count1.max(count2);
    debug_assert!(max >= 1, "a cross arm always holds its own point");
    if meets_richness_threshold(max, j, c) {
        CrossClass::Rich
    } else if max == 1 {
        CrossClass::Isolated
    } else {
        CrossClass::Moderate
    }
}

/// A classified cross at a level point.
#[derive(Clone, Debug)]
pub struct Cross {
    /// The intersection point `ξ`.
    pub point: FreqPoint,
    /// Index `j` of the level holding `ξ`.
    pub level: usize,
    /// The two orthogonal arms, in line-key order.
    pub lines: [Line; 2],
    /// `#(ℓᵢ ∩ S_j)` for each arm.
    pub counts: [u64; 2],
    /// Richness class.
    pub class: CrossClass,
}

impl Cross {
    /// `a = log₂ max{#(ℓ₁∩S_j), #(ℓ₂∩S_j)}`, as a real number.
    pub fn richness_log2(&self) -> f64 {
        (self.counts[0].max(self.counts[1]) as f64).log2()
    }
}

/// Enumerates and classifies the realizable crosses of a level family.
///
/// For each point `ξ ∈ S_j`, the candidate arm directions are the
/// normalized directions from `ξ` to every other point of the family,
/// together with the axis direction; each unordered orthogonal pair of
/// directions yields one cross, and its arm counts are taken within `S_j`.
/// Output order is by level, then point, then arm pair — a function of the
/// family alone.
pub fn classify_crosses<T: Scalar>(
    levels: &DyadicLevels<T>,
    cap: usize,
) -> Result<Vec<Cross>> {
    let c = levels.c();
    let tagged = levels.tagged_points();
    let all: Vec<FreqPoint> = tagged.iter().map(|&(p, _)| p).collect();

    // Per-level arm counts: lines through ≥ 2 points of the level.
    let mut level_counts: Vec<BTreeMap<Line, u64>> = Vec::new();
    for (_, lvl) in levels.iter() {
        let set = PointSet::new(lvl.points.clone());
        let map = collect_lines(&set, cap)?;
        level_counts.push(
            map.into_iter()
                .map(|(l, pts)| (l, pts.len() as u64))
                .collect(),
        );
    }

    let mut out = Vec::new();
    for (j, lvl) in levels.iter() {
        for &xi in &lvl.points {
            let mut pairs: BTreeSet<((i64, i64), (i64, i64))> = BTreeSet::new();
            let axis = (1, 0);
            for d in all
                .iter()
                .filter(|&&p| p != xi)
                .map(|&p| normalize_direction(p.sub(xi)))
                .chain(std::iter::once(axis))
            {
                let q = normalize_direction(vec_perp(d));
                pairs.insert((d.min(q), d.max(q)));
            }
            for (d1, d2) in pairs {
                let l1 = Line::with_direction(d1, xi)?;
                let l2 = Line::with_direction(d2, xi)?;
                let count = |l: &Line| level_counts[j].get(l).copied().unwrap_or(1);
                let (c1, c2) = (count(&l1), count(&l2));
                out.push(Cross {
                    point: xi,
                    level: j,
                    lines: [l1, l2],
                    counts: [c1, c2],
                    class: classify_counts(c1, c2, j, c),
                });
            }
        }
    }
    Ok(out)
}
