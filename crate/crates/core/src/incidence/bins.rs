//! Rectangle counting over level families: richness bins and class sums.
//!
//! The objects counted here are the right-angled parallelograms of the
//! quadruple backend — ordered quadruples `(ξ₁, ξ₂, ξ₃, ξ₄)` with
//! `ξ₁+ξ₃ = ξ₂+ξ₄`, vanishing resonance phase and four distinct vertices —
//! with every vertex in some level of a dyadic family `{S_j}`. Each vertex
//! `ξ_k ∈ S_{j_k}` looks along its two edge lines and records
//! `2^{a_k} ≤ max{#(ℓ_{k,k+1} ∩ S_{j_k}), #(ℓ_{k,k-1} ∩ S_{j_k})} < 2^{a_k+1}`
//! (indices cyclic); [`rectangle_bins`] buckets the rectangles by
//! `(j₁..j₄, a₁..a₄)` and also accumulates `Σ 1/gcd(ξ₁−ξ₄)` per bucket.
//!
//! [`bound_ratios`] compares a bucket against the counting bounds it is
//! expected to obey: when the corner window `1 ≤ a₁ < j₁/2 + C` holds, the
//! count is `O(2^{2j₁−2a₁+a₂+a₄})` and `O(2^{2j₁−2a₁+a₂+a₃})` and the
//! gcd-weighted count is `O(2^{2j₁−2a₁+a₂+a₄/2})`;
//! unconditionally the count is `O(2^{j₁+j₂+a₃})`, since a `(ξ₁, ξ₂)` pair
//! leaves at most `2^{a₃+1}` choices of `ξ₃` on the line through `ξ₂`
//! orthogonal to `ξ₁ξ₂`.
//!
//! [`type_sums`] classifies each vertex's cross as rich, moderate or
//! isolated (see [`crosses`](super::crosses)) and accumulates the quadruple
//! weight `f(Q) = f(ξ₁)f(ξ₂)f(ξ₃)f(ξ₄)` over the cells where `ξ₁, ξ₂`
//! share one class and `ξ₃, ξ₄` another; rectangles whose vertex pairs
//! disagree form a separate remainder, as the cells deliberately cover only
//! part of the rectangle population.

use std::collections::{BTreeMap, HashMap};

use crate::error::{CoreError, Result};
use crate::lattice::{vec_perp, FreqPoint};
use crate::levels::DyadicLevels;
use crate::numeric::{fmt_float, NeumaierSum};
use crate::pointset::PointSet;
use crate::quadruple::Parallelogram;
use crate::scalar::Scalar;
use crate::spectrum::WeightedSpectrum;

use super::crosses::{classify_counts, CrossClass};
use super::lines::{collect_lines, Line};

/// Cap on the total point count of a family entering rectangle enumeration.
pub const RECTANGLE_BIN_CAP: usize = 2000;

/// Visits every rectangle of `set` with four distinct vertices exactly
/// once, in the lexicographic `(ξ₁, ξ₂, ξ₄)` order of
/// [`visit_parallelograms`](crate::quadruple::visit_parallelograms) — this
/// is precisely that enumeration restricted to `σ_Q = 0` and distinct
/// vertices, realized without the cubic loop: `ξ₄` ranges over the incident
/// points of the line through `ξ₁` orthogonal to `ξ₁ξ₂`.
///
/// `lines` must be the incidence map of `set` (see
/// [`collect_lines`](super::collect_lines)); lines absent from it hold no
/// second set point and contribute nothing.
pub fn visit_rectangles<F>(
    set: &PointSet,
    lines: &BTreeMap<Line, Vec<FreqPoint>>,
    mut visit: F,
) where
    F: FnMut(&Parallelogram),
{
    let pts = set.points();
    for &p1 in pts {
        for &p2 in pts {
            if p2 == p1 {
                continue;
            }
            // ξ₄ must satisfy (ξ₁−ξ₂)·(ξ₁−ξ₄) = 0. If the orthogonal
            // direction does not normalize into coordinate bounds, no pair
            // of set points realizes it (the map build would have failed),
            // so the line holds ξ₁ alone.
            let Ok(leg) = Line::with_direction(vec_perp(p2.sub(p1)), p1) else {
                continue;
            };
            let Some(candidates) = lines.get(&leg) else {
                continue;
            };
            for &p4 in candidates {
                if p4 == p1 {
                    continue;
                }
                let x3 = p2.x + p4.x - p1.x;
                let y3 = p2.y + p4.y - p1.y;
                if let Some(i3) = set.position(x3, y3) {
                    let q = Parallelogram::new(p1, p2, pts[i3 as usize], p4)
                        .expect("vertex relation holds by construction");
                    debug_assert!(q.is_rectangle() && q.has_distinct_vertices());
                    visit(&q);
                }
            }
        }
    }
}

/// Shared scaffolding: the union point set of a family, the level of each
/// point, the union incidence map, and per-level arm counts.
struct LevelFrame {
    set: PointSet,
    level_of: HashMap<FreqPoint, usize>,
    union_lines: BTreeMap<Line, Vec<FreqPoint>>,
    level_counts: Vec<BTreeMap<Line, u64>>,
}

impl LevelFrame {
    fn build<T: Scalar>(levels: &DyadicLevels<T>, cap: usize) -> Result<Self> {
        let tagged = levels.tagged_points();
        if tagged.len() > cap {
            return Err(CoreError::CapExceeded {
                what: "rectangle bin support size",
                limit: cap as u64,
                got: tagged.len() as u64,
            });
        }
        let level_of: HashMap<FreqPoint, usize> = tagged.iter().copied().collect();
        let set = PointSet::new(tagged.into_iter().map(|(p, _)| p).collect());
        let union_lines = collect_lines(&set, cap)?;
        let mut level_counts = Vec::new();
        for (_, lvl) in levels.iter() {
            let level_set = PointSet::new(lvl.points.clone());
            level_counts.push(
                collect_lines(&level_set, cap)?
                    .into_iter()
                    .map(|(l, pts)| (l, pts.len() as u64))
                    .collect(),
            );
        }
        Ok(Self {
            set,
            level_of,
            union_lines,
            level_counts,
        })
    }

    /// Levels and per-vertex arm counts (edge toward the next vertex, edge
    /// toward the previous one) of a rectangle.
    fn vertex_data(&self, q: &Parallelogram) -> ([usize; 4], [(u64, u64); 4]) {
        let v = q.vertices();
        let j = v.map(|p| self.level_of[&p]);
        let edge = |a: FreqPoint, b: FreqPoint| {
            Line::through(a, b).expect("rectangle vertices are distinct")
        };
        let sides = [
            edge(v[0], v[1]),
            edge(v[1], v[2]),
            edge(v[2], v[3]),
            edge(v[3], v[0]),
        ];
        let count = |l: &Line, j: usize| self.level_counts[j].get(l).copied().unwrap_or(1);
        let counts = [
            (count(&sides[0], j[0]), count(&sides[3], j[0])),
            (count(&sides[1], j[1]), count(&sides[0], j[1])),
            (count(&sides[2], j[2]), count(&sides[1], j[2])),
            (count(&sides[3], j[3]), count(&sides[2], j[3])),
        ];
        (j, counts)
    }
}

/// One richness bucket `(j⃗, a⃗)` of distinct-vertex rectangles.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RectangleBin {
    /// Level indices `j₁..j₄` of the four vertices.
    pub j: [u32; 4],
    /// Richness exponents `a₁..a₄`: `2^{a_k} ≤ max arm count < 2^{a_k+1}`.
    pub a: [u32; 4],
    /// Number of rectangles in the bucket.
    pub count: u128,
    /// `Σ 1/gcd(ξ₁−ξ₄)` over the bucket.
    pub gcd_weighted: f64,
}

/// Buckets all distinct-vertex rectangles of the family by `(j⃗, a⃗)`,
/// sorted by key. Exhaustive enumeration, hence the cap on total points.
pub fn rectangle_bins<T: Scalar>(
    levels: &DyadicLevels<T>,
    cap: usize,
) -> Result<Vec<RectangleBin>> {
    let frame = LevelFrame::build(levels, cap)?;
    let mut buckets: BTreeMap<([u32; 4], [u32; 4]), (u128, NeumaierSum<f64>)> =
        BTreeMap::new();
    visit_rectangles(&frame.set, &frame.union_lines, |q| {
        let (j, counts) = frame.vertex_data(q);
        let a = counts.map(|(s, t)| s.max(t).ilog2());
        let key = (j.map(|x| x as u32), a);
        let entry = buckets.entry(key).or_insert((0, NeumaierSum::new()));
        entry.0 += 1;
        let g = q.side_gcd().expect("distinct vertices") as f64;
        entry.1.add(1.0 / g);
    });
    Ok(buckets
        .into_iter()
        .map(|((j, a), (count, gcd))| RectangleBin {
            j,
            a,
            count,
            gcd_weighted: gcd.value(),
        })
        .collect())
}

/// Observed-to-allowed ratios of one bucket against its counting bounds.
///
/// The three corner ratios require the moderate-corner window
/// `1 ≤ a₁ < j₁/2 + C` and are `None` outside it; the pair ratio needs no
/// hypothesis.
#[derive(Copy, Clone, Debug)]
pub struct BinBoundCheck {
    /// `count / 2^{2j₁−2a₁+a₂+a₄}`.
    pub corner_adjacent: Option<f64>,
    /// `count / 2^{2j₁−2a₁+a₂+a₃}`.
    pub corner_opposite: Option<f64>,
    /// `gcd_weighted / 2^{2j₁−2a₁+a₂+a₄/2}`.
    pub corner_gcd: Option<f64>,
    /// `count / 2^{j₁+j₂+a₃}`.
    pub pair_extension: f64,
}

/// Computes the bound ratios of a bucket for richness constant `c`.
pub fn bound_ratios(bin: &RectangleBin, c: u32) -> BinBoundCheck {
    let [j1, j2, _, _] = bin.j.map(f64::from);
    let [a1, a2, a3, a4] = bin.a.map(f64::from);
    let count = bin.count as f64;
    let moderate_corner = bin.a[0] >= 1 && 2 * bin.a[0] < bin.j[0] + 2 * c;
    let corner = |extra: f64, value: f64| {
        moderate_corner.then(|| value / (2.0 * (j1 - a1) + a2 + extra).exp2())
    };
    BinBoundCheck {
        corner_adjacent: corner(a4, count),
        corner_opposite: corner(a3, count),
        corner_gcd: corner(a4 / 2.0, bin.gcd_weighted),
        pair_extension: count / (j1 + j2 + a3).exp2(),
    }
}

/// CSV rendering of buckets, one row per bin in key order.
pub fn bins_csv(bins: &[RectangleBin]) -> String {
    let mut out = String::from("j1,j2,j3,j4,a1,a2,a3,a4,count,gcd_weighted\n");
    for b in bins {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            b.j[0],
            b.j[1],
            b.j[2],
            b.j[3],
            b.a[0],
            b.a[1],
            b.a[2],
            b.a[3],
            b.count,
            fmt_float(b.gcd_weighted)
        ));
    }
    out
}

/// Weighted rectangle sums per ordered pair of vertex classes.
///
/// `sums[α−1][β−1]` totals `f(Q)` over rectangles whose vertices `ξ₁, ξ₂`
/// both classify as `α` and `ξ₃, ξ₄` both as `β`; `unpaired` totals the
/// rectangles outside every cell. `gcd_weighted_mid` carries the
/// `Σ f(Q)/gcd(ξ₁−ξ₄)` refinement of the moderate–moderate cell.
#[derive(Clone, Debug)]
pub struct TypeSumReport<T: Scalar> {
    pub sums: [[T; 3]; 3],
    pub gcd_weighted_mid: T,
    pub unpaired: T,
    pub rectangles: u128,
    pub lambda_l2: T,
    pub m: usize,
}

impl<T: Scalar> TypeSumReport<T> {
    /// Cell sum for 1-based class labels.
    pub fn cell(&self, alpha: usize, beta: usize) -> T {
        self.sums[alpha - 1][beta - 1]
    }

    /// `‖λ‖⁴_{ℓ²}`, the natural comparison scale of every cell.
    pub fn lambda_fourth(&self) -> T {
        self.lambda_l2.powi(4)
    }

    /// Total weight over all distinct-vertex rectangles.
    pub fn total(&self) -> T {
        let mut acc = NeumaierSum::new();
        for row in &self.sums {
            for &v in row {
                acc.add(v);
            }
        }
        acc.add(self.unpaired);
        acc.value()
    }
}

/// Accumulates `f(Q)` over the class cells of a family.
///
/// `f` must be nonnegative and cover every point of the family.
pub fn type_sums<T: Scalar>(
    levels: &DyadicLevels<T>,
    f: &WeightedSpectrum<T>,
    cap: usize,
) -> Result<TypeSumReport<T>> {
    let weights: HashMap<FreqPoint, T> = f.nonnegative_entries()?.into_iter().collect();
    let frame = LevelFrame::build(levels, cap)?;
    for p in frame.set.iter() {
        if !weights.contains_key(&p) {
            return Err(CoreError::validation(format!(
                "level point {p} carries no amplitude"
            )));
        }
    }
    let c = levels.c();
    let mut sums = [[NeumaierSum::<T>::new(); 3]; 3];
    let mut gcd_mid = NeumaierSum::<T>::new();
    let mut unpaired = NeumaierSum::<T>::new();
    let mut rectangles = 0u128;
    visit_rectangles(&frame.set, &frame.union_lines, |q| {
        rectangles += 1;
        let (j, counts) = frame.vertex_data(q);
        let class: Vec<CrossClass> = (0..4)
            .map(|k| classify_counts(counts[k].0, counts[k].1, j[k], c))
            .collect();
        let v = q.vertices();
        let w = v
            .iter()
            .map(|p| weights[p])
            .fold(T::one(), |acc, x| acc * x);
        if class[0] == class[1] && class[2] == class[3] {
            let (alpha, beta) = (class[0].index() as usize, class[2].index() as usize);
            sums[alpha - 1][beta - 1].add(w);
            if alpha == 2 && beta == 2 {
                let g = q.side_gcd().expect("distinct vertices");
                gcd_mid.add(w / T::from_i64c(g));
            }
        } else {
            unpaired.add(w);
        }
    });
    Ok(TypeSumReport {
        sums: sums.map(|row| row.map(|s| s.value())),
        gcd_weighted_mid: gcd_mid.value(),
        unpaired: unpaired.value(),
        rectangles,
        lambda_l2: levels.lambda_l2(),
        m: levels.m(),
    })
}
