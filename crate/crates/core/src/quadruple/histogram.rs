//! Aggregation of parallelogram families by resonance size `τ = |σ|`.
//!
//! A [`TauHistogram`] records, for each τ, how many quadruples attain it and
//! what their total weight `Σ f(Q)` is. Because the signed phases come in
//! `±σ` pairs (swap the diagonal pairs of a quadruple), no information
//! relevant to the even time kernels is lost by keying on `τ`. The τ = 0
//! bin is the rectangle class; the dyadic view groups the oscillating bins
//! into shells `τ ∈ [M, 2M)`, `M ∈ 2^ℕ`.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::numeric::{fmt_float, NeumaierSum};
use crate::pointset::{PointSet, WeightedSupport};
use crate::scalar::Scalar;

/// One τ class: exact quadruple count and accumulated weight.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TauBin<T> {
    pub count: u128,
    pub weighted_sum: T,
}

/// Exact τ-indexed aggregation of all parallelograms of a set.
#[derive(Clone, Debug)]
pub struct TauHistogram<T: Scalar> {
    bins: BTreeMap<u64, TauBin<T>>,
}

/// Largest τ-slot table used before falling back to a tree map. τ is always
/// even, so slot `τ/2` serves `τ ≤ 8·max|ξ|²`.
const DENSE_TAU_SLOT_CAP: i64 = 1 << 22;

enum Acc<T: Scalar> {
    Dense(Vec<(u128, NeumaierSum<T>)>),
    Sparse(BTreeMap<u64, (u128, NeumaierSum<T>)>),
}

impl<T: Scalar> Acc<T> {
    fn for_set(set: &PointSet) -> Self {
        // |σ| = 2|(ξ₁−ξ₂)·(ξ₁−ξ₄)| ≤ 8·max|ξ|² over the set.
        let slots = 4i64.checked_mul(set.max_norm_sq()).map(|s| s + 1);
        match slots {
            Some(s) if s <= DENSE_TAU_SLOT_CAP => {
                Acc::Dense(vec![(0, NeumaierSum::new()); s as usize])
            }
            _ => Acc::Sparse(BTreeMap::new()),
        }
    }

    #[inline]
    fn add(&mut self, tau: u64, weight: T) {
        debug_assert_eq!(tau % 2, 0);
        match self {
            Acc::Dense(slots) => {
                let slot = &mut slots[(tau / 2) as usize];
                slot.0 += 1;
                slot.1.add(weight);
            }
            Acc::Sparse(map) => {
                let slot = map
                    .entry(tau)
                    .or_insert_with(|| (0, NeumaierSum::new()));
                slot.0 += 1;
                slot.1.add(weight);
            }
        }
    }

    fn finish(self) -> TauHistogram<T> {
        let mut bins = BTreeMap::new();
        match self {
            Acc::Dense(slots) => {
                for (i, (count, sum)) in slots.into_iter().enumerate() {
                    if count > 0 {
                        bins.insert(
                            2 * i as u64,
                            TauBin {
                                count,
                                weighted_sum: sum.value(),
                            },
                        );
                    }
                }
            }
            Acc::Sparse(map) => {
                for (tau, (count, sum)) in map {
                    bins.insert(
                        tau,
                        TauBin {
                            count,
                            weighted_sum: sum.value(),
                        },
                    );
                }
            }
        }
        TauHistogram { bins }
    }
}

fn build<T: Scalar>(set: &PointSet, weights: Option<&[T]>, cap: usize) -> Result<TauHistogram<T>> {
    super::check_cap(set.len(), cap)?;
    let mut acc = Acc::for_set(set);
    let pts = set.points();
    // Sequential walk in canonical (ξ₁, ξ₂, ξ₄) order: per-bin accumulation
    // order is fixed, so histograms are reproducible bit for bit.
    for (i1, &p1) in pts.iter().enumerate() {
        for (i2, &p2) in pts.iter().enumerate() {
            let d12 = p1.sub(p2);
            for (i4, &p4) in pts.iter().enumerate() {
                let x3 = p2.x + p4.x - p1.x;
                let y3 = p2.y + p4.y - p1.y;
                if let Some(i3) = set.position(x3, y3) {
                    let sigma = 2 * crate::lattice::vec_dot_i128(d12, p1.sub(p4));
                    let w = match weights {
                        Some(w) => w[i1] * w[i2] * w[i3 as usize] * w[i4],
                        None => T::one(),
                    };
                    acc.add((sigma as i64).unsigned_abs(), w);
                }
            }
        }
    }
    Ok(acc.finish())
}

impl<T: Scalar> TauHistogram<T> {
    /// Histogram of the support of a nonnegative spectrum, weighted by
    /// `f(Q) = f(ξ₁)f(ξ₂)f(ξ₃)f(ξ₄)`.
    pub fn from_weighted(ws: &WeightedSupport<T>, cap: usize) -> Result<Self> {
        build(ws.set(), Some(ws.weights()), cap)
    }

    /// Unweighted histogram of a point set (`f = χ_S`, so weighted sums
    /// equal counts).
    pub fn from_point_set(set: &PointSet, cap: usize) -> Result<Self> {
        build(set, None, cap)
    }

    pub(crate) fn from_raw_bins(raw: BTreeMap<u64, (u128, T)>) -> Self {
        Self {
            bins: raw
                .into_iter()
                .map(|(tau, (count, weighted_sum))| {
                    (
                        tau,
                        TauBin {
                            count,
                            weighted_sum,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn bin(&self, tau: u64) -> Option<&TauBin<T>> {
        self.bins.get(&tau)
    }

    /// Number of rectangles (the τ = 0 class).
    pub fn rectangle_count(&self) -> u128 {
        self.bins.get(&0).map_or(0, |b| b.count)
    }

    /// Total quadruple count; equals the additive energy of the support.
    pub fn total_count(&self) -> u128 {
        self.bins.values().map(|b| b.count).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &TauBin<T>)> {
        self.bins.iter().map(|(&tau, bin)| (tau, bin))
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Count and weight over `τ ∈ [lo, hi)`, combined in ascending τ order.
    pub fn range_sum(&self, lo: u64, hi: u64) -> (u128, T) {
        let mut count = 0u128;
        let mut sum = NeumaierSum::new();
        for bin in self.bins.range(lo..hi).map(|(_, b)| b) {
            count += bin.count;
            sum.add(bin.weighted_sum);
        }
        (count, sum.value())
    }

    /// Dyadic shells: bin τ ≥ 2 lands in the shell `M = 2^⌊log₂ τ⌋`, i.e.
    /// `τ ∈ [M, 2M)`. The rectangle class τ = 0 belongs to no shell and is
    /// omitted.
    pub fn dyadic(&self) -> BTreeMap<u64, TauBin<T>> {
        let mut shells: BTreeMap<u64, (u128, NeumaierSum<T>)> = BTreeMap::new();
        for (&tau, bin) in &self.bins {
            if tau == 0 {
                continue;
            }
            let shell = 1u64 << tau.ilog2();
            let slot = shells
                .entry(shell)
                .or_insert_with(|| (0, NeumaierSum::new()));
            slot.0 += bin.count;
            slot.1.add(bin.weighted_sum);
        }
        shells
            .into_iter()
            .map(|(m, (count, sum))| {
                (
                    m,
                    TauBin {
                        count,
                        weighted_sum: sum.value(),
                    },
                )
            })
            .collect()
    }

    /// CSV rows `tau,count,weighted_sum` in ascending τ.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,count,weighted_sum\n");
        for (&tau, bin) in &self.bins {
            out.push_str(&format!(
                "{},{},{}\n",
                tau,
                bin.count,
                fmt_float(bin.weighted_sum)
            ));
        }
        out
    }

    /// CSV rows `M,count,weighted_sum` over the dyadic shells.
    pub fn dyadic_csv(&self) -> String {
        let mut out = String::from("M,count,weighted_sum\n");
        for (m, bin) in self.dyadic() {
            out.push_str(&format!(
                "{},{},{}\n",
                m,
                bin.count,
                fmt_float(bin.weighted_sum)
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fp;
    use crate::quadruple::{additive_energy, visit_parallelograms};
    use crate::spectrum::WeightedSpectrum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn indicator_set(points: &[(i64, i64)]) -> PointSet {
        PointSet::new(points.iter().map(|&(x, y)| fp(x, y)).collect())
    }

    #[test]
    fn pinned_small_histograms() {
        let grid = indicator_set(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        let h = TauHistogram::<f64>::from_point_set(&grid, 16).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.bin(0).unwrap().count, 36);
        assert_eq!(h.bin(0).unwrap().weighted_sum, 36.0);

        let line = indicator_set(&[(-1, 0), (0, 0), (1, 0)]);
        let h = TauHistogram::<f64>::from_point_set(&line, 16).unwrap();
        assert_eq!(h.rectangle_count(), 15);
        assert_eq!(h.bin(2).unwrap().count, 4);
        assert_eq!(h.total_count(), 19);
    }

    #[test]
    fn weighted_two_point_spectrum() {
        // Points (0,0) and (1,0) with weights 2 and 3. The six σ=0
        // quadruples weigh 2⁴ + 3⁴ + 4·(2·3·2·3) = 241.
        let mut f = WeightedSpectrum::<f64>::new();
        f.set_real(fp(0, 0), 2.0);
        f.set_real(fp(1, 0), 3.0);
        let ws = WeightedSupport::from_spectrum(&f).unwrap();
        let h = TauHistogram::from_weighted(&ws, 16).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.bin(0).unwrap().count, 6);
        assert_eq!(h.bin(0).unwrap().weighted_sum, 241.0);
    }

    #[test]
    fn dyadic_shells_key_by_floor_log2() {
        let raw: BTreeMap<u64, (u128, f64)> = [
            (0, (7, 7.0)),
            (2, (1, 1.0)),
            (4, (2, 2.0)),
            (6, (3, 3.5)),
            (8, (4, 4.0)),
            (14, (5, 5.0)),
            (16, (6, 6.0)),
        ]
        .into_iter()
        .collect();
        let h = TauHistogram::from_raw_bins(raw);
        let d = h.dyadic();
        let keys: Vec<u64> = d.keys().copied().collect();
        assert_eq!(keys, vec![2, 4, 8, 16]);
        assert_eq!(d[&2].count, 1);
        assert_eq!(d[&4].count, 5);
        assert_eq!(d[&4].weighted_sum, 5.5);
        assert_eq!(d[&8].count, 9);
        assert_eq!(d[&16].count, 6);
    }

    #[test]
    fn csv_is_pinned() {
        let line = indicator_set(&[(-1, 0), (0, 0), (1, 0)]);
        let h = TauHistogram::<f64>::from_point_set(&line, 16).unwrap();
        assert_eq!(
            h.to_csv(),
            "tau,count,weighted_sum\n0,15,1.5000000000000000e1\n2,4,4.0000000000000000e0\n"
        );
        assert_eq!(
            h.dyadic_csv(),
            "M,count,weighted_sum\n2,4,4.0000000000000000e0\n"
        );
    }

    #[test]
    fn totals_match_energy_and_signed_counts_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let set = PointSet::new(
                (0..25)
                    .map(|_| fp(rng.gen_range(-7..=7), rng.gen_range(-7..=7)))
                    .collect(),
            );
            let h = TauHistogram::<f64>::from_point_set(&set, 64).unwrap();
            assert_eq!(h.total_count(), additive_energy(&set));
            let mut signed: BTreeMap<i64, u128> = BTreeMap::new();
            visit_parallelograms(&set, 64, |q| *signed.entry(q.sigma()).or_insert(0) += 1)
                .unwrap();
            for (&s, &c) in &signed {
                assert_eq!(signed.get(&-s), Some(&c), "σ = {s}");
                assert_eq!(
                    h.bin(s.unsigned_abs()).unwrap().count,
                    c + if s != 0 { signed[&-s] } else { 0 },
                );
            }
        }
    }

    #[test]
    fn sparse_accumulator_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let small: Vec<(i64, i64)> = (0..18)
            .map(|_| (rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
            .collect();
        // The same configuration scaled far out: τ scales by the square of
        // the factor, forcing the sparse accumulator, while counts and the
        // τ-ordering of bins are preserved.
        let scale = 1 << 14;
        let large: Vec<(i64, i64)> = small.iter().map(|&(x, y)| (x * scale, y * scale)).collect();
        let hs = TauHistogram::<f64>::from_point_set(&indicator_set(&small), 64).unwrap();
        let hl = TauHistogram::<f64>::from_point_set(&indicator_set(&large), 64).unwrap();
        assert_eq!(hs.len(), hl.len());
        let s2 = (scale as u64) * (scale as u64);
        for ((ts, bs), (tl, bl)) in hs.iter().zip(hl.iter()) {
            assert_eq!(ts * s2, tl);
            assert_eq!(bs.count, bl.count);
        }
    }

    #[test]
    fn empty_histogram() {
        let h = TauHistogram::<f64>::from_point_set(&PointSet::new(vec![]), 16).unwrap();
        assert!(h.is_empty());
        assert_eq!(h.rectangle_count(), 0);
        assert_eq!(h.to_csv(), "tau,count,weighted_sum\n");
    }
}
