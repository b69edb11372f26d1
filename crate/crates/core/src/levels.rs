//! Dyadic level decomposition of a nonnegative spectrum.
//!
//! Given `f >= 0` with finite support, enumerate the support as
//! `ξ_1, ξ_2, …` with `f(ξ_1) >= f(ξ_2) >= …` (ties broken
//! lexicographically), set `m` to the least integer exceeding
//! `log2 #supp f`, and for `j = 0..=m` define the level sets and weights
//!
//! ```text
//!   S_j^0 = { ξ_k : 2^j <= k < 2^{j+1} } ∩ supp f      (1-based k)
//!   λ_j   = 2^{j/2} · f(ξ_{2^j})                        (0 beyond the support)
//! ```
//!
//! The step function `g = Σ_j λ_j 2^{-j/2} χ_{S_j}` then dominates `f`
//! pointwise and `‖λ‖_{ℓ^2} <= √3 ‖f‖_{ℓ^2}`. Each level holds at most
//! `2^j` points, which is the size bound every counting estimate downstream
//! consumes.

use crate::error::{CoreError, Result};
use crate::lattice::FreqPoint;
use crate::scalar::Scalar;
use crate::spectrum::WeightedSpectrum;

/// One dyadic level: its point set, the weight `λ_j`, and the plateau value
/// `λ_j 2^{-j/2}` stored exactly as the amplitude it came from.
#[derive(Clone, Debug)]
pub struct LevelSet<T: Scalar> {
    /// Points of the level, lexicographically sorted.
    pub points: Vec<FreqPoint>,
    /// `λ_j = 2^{j/2} · value`.
    pub lambda: T,
    /// Plateau height `λ_j 2^{-j/2}`; kept verbatim from the generating
    /// amplitude so pointwise domination checks are exact.
    pub value: T,
}

/// The full family `(S_j, λ_j)_{j=0..=m}` together with the richness
/// constant `C` used by incidence thresholds downstream.
#[derive(Clone, Debug)]
pub struct DyadicLevels<T: Scalar> {
    m: usize,
    c: u32,
    levels: Vec<LevelSet<T>>,
}

impl<T: Scalar> DyadicLevels<T> {
    /// Builds the level family of a nonnegative spectrum.
    ///
    /// `c >= 1` is required: richness thresholds `2^{j/2+c}` must exceed 1
    /// so that only realized lines (two or more points) can be rich.
    pub fn build(f: &WeightedSpectrum<T>, c: u32) -> Result<Self> {
        if c == 0 {
            return Err(CoreError::validation(
                "richness constant C must be at least 1",
            ));
        }
        let mut entries = f.nonnegative_entries()?;
        if entries.is_empty() {
            return Err(CoreError::validation(
                "cannot build levels of an empty spectrum",
            ));
        }
        // Descending by value; ties lexicographic by frequency. The
        // lexicographic key makes the enumeration — and everything derived
        // from it — independent of input order.
        entries.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("amplitudes are finite")
                .then_with(|| a.0.cmp(&b.0))
        });
        let n = entries.len();
        let m = (n.ilog2() + 1) as usize;
        let mut levels = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let lo = 1usize << j; // 1-based anchor index 2^j
            let hi = (1usize << (j + 1)) - 1;
            let (points, value) = if lo <= n {
                let slice = &entries[lo - 1..hi.min(n)];
                let mut pts: Vec<FreqPoint> = slice.iter().map(|e| e.0).collect();
                pts.sort();
                (pts, entries[lo - 1].1)
            } else {
                (Vec::new(), T::zero())
            };
            let lambda = T::from_f64c((1u64 << j) as f64).sqrt() * value;
            levels.push(LevelSet {
                points,
                lambda,
                value,
            });
        }
        Ok(Self { m, c, levels })
    }

    /// Assembles a family from explicit parts (used to stage counting
    /// scenarios directly). Validates disjointness and the `#S_j <= 2^j`
    /// size bound.
    pub fn from_parts(sets: Vec<Vec<FreqPoint>>, values: Vec<T>, c: u32) -> Result<Self> {
        if c == 0 {
            return Err(CoreError::validation(
                "richness constant C must be at least 1",
            ));
        }
        if sets.is_empty() || sets.len() != values.len() {
            return Err(CoreError::validation(
                "level sets and values must be nonempty and equal in number",
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut levels = Vec::with_capacity(sets.len());
        for (j, (mut pts, value)) in sets.into_iter().zip(values).enumerate() {
            if pts.len() > (1usize << j) {
                return Err(CoreError::validation(format!(
                    "level {j} has {} points, allowed at most 2^{j}",
                    pts.len()
                )));
            }
            if value < T::zero() {
                return Err(CoreError::validation("level values must be >= 0"));
            }
            pts.sort();
            pts.dedup();
            for &p in &pts {
                if !seen.insert(p) {
                    return Err(CoreError::validation(format!(
                        "levels must be disjoint; {p} repeats"
                    )));
                }
            }
            let lambda = T::from_f64c((1u64 << j) as f64).sqrt() * value;
            levels.push(LevelSet {
                points: pts,
                lambda,
                value,
            });
        }
        Ok(Self {
            m: levels.len() - 1,
            c,
            levels,
        })
    }

    /// Replaces every level's point set (e.g. after removing exceptional
    /// points), keeping weights and `C`. Each new set must be a subset of
    /// the old one.
    pub fn with_sets(&self, sets: Vec<Vec<FreqPoint>>) -> Result<Self> {
        if sets.len() != self.levels.len() {
            return Err(CoreError::validation("level count mismatch"));
        }
        let mut levels = self.levels.clone();
        for (lvl, mut pts) in levels.iter_mut().zip(sets) {
            pts.sort();
            pts.dedup();
            let old: std::collections::BTreeSet<_> = lvl.points.iter().copied().collect();
            if !pts.iter().all(|p| old.contains(p)) {
                return Err(CoreError::validation(
                    "replacement level sets must be subsets of the original",
                ));
            }
            lvl.points = pts;
        }
        Ok(Self {
            m: self.m,
            c: self.c,
            levels,
        })
    }

    /// Index of the deepest level, i.e. levels are `0..=m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Richness constant `C`.
    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn level(&self, j: usize) -> &LevelSet<T> {
        &self.levels[j]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &LevelSet<T>)> {
        self.levels.iter().enumerate()
    }

    /// All points of the family with their level index, lexicographically
    /// sorted (levels are disjoint).
    pub fn tagged_points(&self) -> Vec<(FreqPoint, usize)> {
        let mut out: Vec<(FreqPoint, usize)> = self
            .levels
            .iter()
            .enumerate()
            .flat_map(|(j, l)| l.points.iter().map(move |&p| (p, j)))
            .collect();
        out.sort();
        out
    }

    /// Total number of points across levels.
    pub fn total_points(&self) -> usize {
        self.levels.iter().map(|l| l.points.len()).sum()
    }

    /// `‖λ‖_{ℓ^2}` over `j = 0..=m`.
    pub fn lambda_l2(&self) -> T {
        self.levels
            .iter()
            .map(|l| l.lambda * l.lambda)
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// The dominating step function `g = Σ_j λ_j 2^{-j/2} χ_{S_j}` as a
    /// spectrum (plateau values are the stored exact amplitudes).
    pub fn reconstruct(&self) -> WeightedSpectrum<T> {
        let mut s = WeightedSpectrum::new();
        for lvl in &self.levels {
            for &p in &lvl.points {
                s.set_real(p, lvl.value);
            }
        }
        s
    }
}
