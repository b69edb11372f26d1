//! Exceptional sets and the halving decomposition of a nonnegative spectrum.
//!
//! For a dyadic level family `{S_j⁰}` with richness constant `C`, the
//! exceptional set `E_j` collects the points of `S_j⁰` lying on **two**
//! distinct lines that each hold at least `2^{j/2+C}` points of `S_j⁰`.
//! Since two distinct lines meet in at most one lattice point,
//! `#E_j ≤ binom(r, 2)` for `r` rich lines, so `√(#E_j) ≤ r`.
//!
//! [`decompose`] iterates the construction: starting from `f₀ = f`, each
//! step builds the level family of `f_n`, restricts to the union
//! `E = ∪_j E_j` to form `f_{n+1} = f_n · χ_E`, and emits the peeled part
//! `h_n = f_n − f_{n+1}`. Removing `E_j` from `S_j⁰` leaves a set in which
//! no point lies on two rich lines — any such pair would already have been
//! rich in the superset — so every emitted family satisfies the
//! at-most-one-rich-line hypothesis by construction, and the interesting
//! empirical question, recorded per step, is whether the restriction
//! halves the norm: `‖f_{n+1}‖_{ℓ²} ≤ ½‖f_n‖_{ℓ²}`.
//!
//! Amplitudes are only ever copied, never rescaled, so the peeled parts
//! have pairwise disjoint supports and `Σ_n h_n` recovers `f` bit for bit.
//! Termination is guaranteed by strict support decrease; when halving holds
//! throughout, the iteration reaches `f_N = 0` exactly, because a nonzero
//! restriction of `f` can never have norm below the smallest nonzero
//! amplitude of `f`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{CoreError, Result};
use crate::lattice::FreqPoint;
use crate::levels::DyadicLevels;
use crate::numeric::fmt_float;
use crate::pointset::PointSet;
use crate::scalar::Scalar;
use crate::spectrum::WeightedSpectrum;

use super::lines::collect_lines;
use super::meets_richness_threshold;

/// The exceptional points of one level, with the rich-line count that
/// produced them.
#[derive(Clone, Debug)]
pub struct ExceptionalLevel {
    /// Level index `j`.
    pub level: usize,
    /// Points of `S_j⁰` on at least two rich lines, lexicographically sorted.
    pub points: Vec<FreqPoint>,
    /// Number of lines holding `≥ 2^{j/2+C}` points of `S_j⁰`.
    pub rich_lines: usize,
}

impl ExceptionalLevel {
    /// `√(#E_j) ≤ #{rich lines}` — equivalent to `#E_j ≤ r²`, which holds
    /// because two distinct lines share at most one point.
    pub fn bound_holds(&self) -> bool {
        self.points.len() <= self.rich_lines * self.rich_lines
    }
}

/// Computes `E_j` for every level of the family, using its own `C`.
pub fn exceptional_sets<T: Scalar>(
    levels: &DyadicLevels<T>,
    cap: usize,
) -> Result<Vec<ExceptionalLevel>> {
    let c = levels.c();
    let mut out = Vec::new();
    for (j, lvl) in levels.iter() {
        let set = PointSet::new(lvl.points.clone());
        let map = collect_lines(&set, cap)?;
        let mut rich = 0usize;
        let mut hits: HashMap<FreqPoint, u32> = HashMap::new();
        for pts in map.values() {
            if meets_richness_threshold(pts.len() as u64, j, c) {
                rich += 1;
                for &p in pts {
                    *hits.entry(p).or_insert(0) += 1;
                }
            }
        }
        let mut points: Vec<FreqPoint> = hits
            .into_iter()
            .filter(|&(_, n)| n >= 2)
            .map(|(p, _)| p)
            .collect();
        points.sort();
        out.push(ExceptionalLevel {
            level: j,
            points,
            rich_lines: rich,
        });
    }
    Ok(out)
}

/// Whether every point of every level lies on at most one line holding
/// `≥ 2^{j/2+C}` points of that level.
pub fn satisfies_single_rich_line_hypothesis<T: Scalar>(
    levels: &DyadicLevels<T>,
    cap: usize,
) -> Result<bool> {
    Ok(exceptional_sets(levels, cap)?
        .iter()
        .all(|e| e.points.is_empty()))
}

/// One peeling step.
#[derive(Clone, Debug)]
pub struct DecompositionStep<T: Scalar> {
    /// The spectrum `f_n` entering the step.
    pub f: WeightedSpectrum<T>,
    /// The peeled part `h_n = f_n − f_{n+1}` (exact amplitude copies).
    pub h: WeightedSpectrum<T>,
    /// Level family of `f_n`; its plateau function dominates `h_n`.
    pub levels: DyadicLevels<T>,
    /// Exceptional sets `E_j` of those levels.
    pub exceptional: Vec<ExceptionalLevel>,
    /// Whether `‖f_{n+1}‖_{ℓ²} ≤ ½ ‖f_n‖_{ℓ²}` held.
    pub halved: bool,
}

impl<T: Scalar> DecompositionStep<T> {
    /// The reduced family `S_j = S_j⁰ \ E_j` supporting `h_n`.
    pub fn reduced_levels(&self) -> Result<DyadicLevels<T>> {
        let sets = self
            .levels
            .iter()
            .zip(&self.exceptional)
            .map(|((_, lvl), exc)| {
                let drop: BTreeSet<FreqPoint> = exc.points.iter().copied().collect();
                lvl.points
                    .iter()
                    .copied()
                    .filter(|p| !drop.contains(p))
                    .collect()
            })
            .collect();
        self.levels.with_sets(sets)
    }
}

/// The full peeling `f = Σ_n h_n (+ residual)`.
#[derive(Clone, Debug)]
pub struct DecompositionTrace<T: Scalar> {
    steps: Vec<DecompositionStep<T>>,
    residual: WeightedSpectrum<T>,
    c: u32,
}

impl<T: Scalar> DecompositionTrace<T> {
    pub fn steps(&self) -> &[DecompositionStep<T>] {
        &self.steps
    }

    /// Whatever the iteration did not peel; empty on clean termination.
    pub fn residual(&self) -> &WeightedSpectrum<T> {
        &self.residual
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// Whether the iteration consumed the whole spectrum.
    pub fn complete(&self) -> bool {
        self.residual.is_empty()
    }

    /// Whether `‖f_{n+1}‖ ≤ ½‖f_n‖` held at every step; then
    /// `‖f_n‖ ≤ 2^{-n}‖f‖` along the whole chain.
    pub fn halved_at_every_step(&self) -> bool {
        self.steps.iter().all(|s| s.halved)
    }

    /// `Σ_n h_n + residual`, reassembled from the disjoint supports. Equals
    /// the input exactly (amplitudes are copies).
    pub fn reconstruct(&self) -> Result<WeightedSpectrum<T>> {
        let mut out = self.residual.clone();
        for step in &self.steps {
            out.merge_disjoint(&step.h)?;
        }
        Ok(out)
    }

    /// CSV rendering: one `(n, ‖f_n‖_{ℓ²}, halved)` row per step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,l2_norm,halved\n");
        for (n, step) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{n},{},{}\n",
                fmt_float(step.f.l2_norm()),
                step.halved
            ));
        }
        out
    }
}

/// Peels `f ≥ 0` along exceptional sets with richness constant `c ≥ 1`.
///
/// Each step strictly shrinks the support (the loop stops, with the
/// remainder recorded as residual, if it ever fails to — that can only
/// happen when every supported point is exceptional). The `halved` flag
/// compares squared norms with relative slack `1e-9` for summation
/// rounding.
pub fn decompose<T: Scalar>(
    f: &WeightedSpectrum<T>,
    c: u32,
    cap: usize,
) -> Result<DecompositionTrace<T>> {
    f.nonnegative_entries()?;
    if f.support_size() > cap {
        return Err(CoreError::CapExceeded {
            what: "decomposition support size",
            limit: cap as u64,
            got: f.support_size() as u64,
        });
    }
    let mut steps = Vec::new();
    let residual;
    let mut cur = f.clone();
    loop {
        if cur.is_empty() {
            residual = cur;
            break;
        }
        let levels = DyadicLevels::build(&cur, c)?;
        let exceptional = exceptional_sets(&levels, cap)?;
        let keep: BTreeSet<FreqPoint> = exceptional
            .iter()
            .flat_map(|e| e.points.iter().copied())
            .collect();
        let f_next = cur.restrict(|p| keep.contains(&p));
        let h = cur.restrict(|p| !keep.contains(&p));
        let halved = f_next.l2_norm_sq()
            <= cur.l2_norm_sq() * T::from_f64c(0.25 * (1.0 + 1e-9));
        let stalled = f_next.support_size() == cur.support_size();
        steps.push(DecompositionStep {
            f: cur,
            h,
            levels,
            exceptional,
            halved,
        });
        if stalled {
            residual = f_next;
            break;
        }
        cur = f_next;
    }
    Ok(DecompositionTrace {
        steps,
        residual,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::DEFAULT_RICHNESS_C;
    use crate::lattice::fp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn box_indicator(n: i64) -> WeightedSpectrum<f64> {
        WeightedSpectrum::indicator(
            (-n..=n).flat_map(|x| (-n..=n).map(move |y| fp(x, y))),
        )
    }

    fn entries(f: &WeightedSpectrum<f64>) -> Vec<(FreqPoint, f64)> {
        f.nonnegative_entries().unwrap()
    }

    fn random_spectrum(rng: &mut ChaCha8Rng, n: usize, r: i64) -> WeightedSpectrum<f64> {
        let mut f = WeightedSpectrum::new();
        for _ in 0..n {
            f.set_real(
                fp(rng.gen_range(-r..=r), rng.gen_range(-r..=r)),
                rng.gen_range(0.01..1.0),
            );
        }
        f
    }

    #[test]
    fn exceptional_point_at_two_crossing_rich_lines() {
        // Level 4, C = 1, threshold 2^{4/2+1} = 8: a horizontal and a
        // vertical line of 8 points each crossing at the origin. The only
        // point on two rich lines is the crossing.
        let mut pts: Vec<FreqPoint> = (0..8).map(|x| fp(x, 0)).collect();
        pts.extend((1..8).map(|y| fp(0, y)));
        let levels = DyadicLevels::<f64>::from_parts(
            vec![vec![], vec![], vec![], vec![], pts],
            vec![0.0; 4].into_iter().chain([1.0]).collect(),
            1,
        )
        .unwrap();
        let exc = exceptional_sets(&levels, 64).unwrap();
        assert_eq!(exc[4].rich_lines, 2);
        assert_eq!(exc[4].points, vec![fp(0, 0)]);
        assert!(exc[4].bound_holds());
        assert!(!satisfies_single_rich_line_hypothesis(&levels, 64).unwrap());

        // A single line, however rich, leaves the exceptional set empty.
        let one_line = DyadicLevels::<f64>::from_parts(
            vec![vec![], vec![], vec![], vec![], (0..16).map(|x| fp(x, 2)).collect()],
            vec![0.0, 0.0, 0.0, 0.0, 1.0],
            1,
        )
        .unwrap();
        let exc = exceptional_sets(&one_line, 64).unwrap();
        assert_eq!(exc[4].rich_lines, 1);
        assert!(exc[4].points.is_empty());
        assert!(satisfies_single_rich_line_hypothesis(&one_line, 64).unwrap());
    }

    #[test]
    fn no_rich_lines_means_no_exceptional_points() {
        let levels = DyadicLevels::build(
            &WeightedSpectrum::<f64>::indicator([fp(0, 0), fp(3, 1), fp(-2, 5)]),
            2,
        )
        .unwrap();
        for e in exceptional_sets(&levels, 64).unwrap() {
            assert_eq!(e.rich_lines, 0);
            assert!(e.points.is_empty());
        }
    }

    #[test]
    fn two_point_support_terminates_in_one_step() {
        let mut f = WeightedSpectrum::<f64>::new();
        f.set_real(fp(3, 4), 2.0);
        f.set_real(fp(-1, 2), 1.0);
        let trace = decompose(&f, DEFAULT_RICHNESS_C, 64).unwrap();
        assert_eq!(trace.steps().len(), 1);
        assert!(trace.complete());
        assert!(trace.halved_at_every_step());
        assert_eq!(entries(&trace.steps()[0].h), entries(&f));
        assert_eq!(entries(&trace.reconstruct().unwrap()), entries(&f));
    }

    #[test]
    fn empty_spectrum_gives_an_empty_trace() {
        let trace =
            decompose(&WeightedSpectrum::<f64>::new(), DEFAULT_RICHNESS_C, 64).unwrap();
        assert!(trace.steps().is_empty());
        assert!(trace.complete());
        assert!(trace.halved_at_every_step());
    }

    #[test]
    fn box_indicators_halve_at_the_pinned_constant() {
        // The calibration family at reduced scale: box indicators up to
        // [-16,16]². Halving must hold at every step with the default C,
        // the peel must be complete, and every emitted reduced family must
        // satisfy the one-rich-line hypothesis.
        for n in [1i64, 2, 3, 5, 8, 16] {
            let f = box_indicator(n);
            let trace = decompose(&f, DEFAULT_RICHNESS_C, 4096).unwrap();
            assert!(trace.complete(), "N = {n}: incomplete");
            assert!(trace.halved_at_every_step(), "N = {n}: halving failed");
            assert_eq!(entries(&trace.reconstruct().unwrap()), entries(&f));
            for step in trace.steps() {
                let reduced = step.reduced_levels().unwrap();
                assert!(
                    satisfies_single_rich_line_hypothesis(&reduced, 4096).unwrap(),
                    "N = {n}"
                );
            }
        }
    }

    #[test]
    fn random_spectra_reconstruct_exactly_and_respect_norm_decay() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for trial in 0..6 {
            let f = random_spectrum(&mut rng, 120 + 40 * trial, 15 + trial as i64);
            let trace = decompose(&f, DEFAULT_RICHNESS_C, 4096).unwrap();
            assert!(trace.complete());
            // Bitwise reconstruction: amplitudes are copies, never scaled.
            assert_eq!(entries(&trace.reconstruct().unwrap()), entries(&f));
            // ‖f_n‖ ≤ 2^{-n}‖f‖ whenever halving held up to step n.
            if trace.halved_at_every_step() {
                let norm0 = f.l2_norm();
                for (n, step) in trace.steps().iter().enumerate() {
                    assert!(
                        step.f.l2_norm()
                            <= norm0 / (1u64 << n) as f64 * (1.0 + 1e-9),
                        "trial {trial}, step {n}"
                    );
                }
            }
            // Peeled supports are pairwise disjoint and dominated by the
            // step's plateau function.
            let mut seen = BTreeSet::new();
            for step in trace.steps() {
                for (p, a) in step.h.iter() {
                    assert!(seen.insert(p), "support overlap at {p}");
                    let (j, lvl) = step
                        .levels
                        .iter()
                        .find(|(_, l)| l.points.contains(&p))
                        .expect("peeled point belongs to a level");
                    assert!(
                        a.re <= lvl.value,
                        "plateau domination fails at {p} (level {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn trace_csv_shape_is_pinned() {
        let mut f = WeightedSpectrum::<f64>::new();
        f.set_real(fp(0, 0), 2.0);
        let trace = decompose(&f, 1, 16).unwrap();
        assert_eq!(trace.to_csv(), "n,l2_norm,halved\n0,2.0000000000000000e0,true\n");
    }

    #[test]
    fn support_cap_is_enforced() {
        let f = box_indicator(2);
        let err = decompose(&f, 1, 24).unwrap_err();
        assert!(matches!(
            err,
            CoreError::CapExceeded {
                limit: 24,
                got: 25,
                ..
            }
        ));
    }

    #[test]
    fn negative_amplitudes_are_rejected() {
        let mut f = WeightedSpectrum::<f64>::new();
        f.set_real(fp(1, 0), -1.0);
        assert!(decompose(&f, 1, 16).is_err());
    }
}
