//! Weighted frequency spectra.
//!
//! A [`WeightedSpectrum`] is a finitely supported function
//! `f : Z^2 -> C`, the Fourier data of
//! `φ(x) = Σ_ξ f(ξ) e^{iξ·x}` on `T^2 = (R/2πZ)^2`,
//! so that `‖φ‖_{L^2}^2 = (2π)^2 Σ_ξ |f(ξ)|^2`.
//!
//! Counting operations require `f` nonnegative real; propagation works on
//! complex amplitudes. Entries with amplitude exactly zero are never stored,
//! and iteration is always in lexicographic `(x, y)` order, so identical
//! spectra produce identical downstream output bytes.

use crate::error::{CoreError, Result};
use crate::lattice::FreqPoint;
use crate::scalar::Scalar;
use num_complex::Complex;
use std::collections::BTreeMap;

/// Finitely supported map `Z^2 -> C` with canonical iteration order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSpectrum<T: Scalar> {
    entries: BTreeMap<FreqPoint, Complex<T>>,
}

impl<T: Scalar> Default for WeightedSpectrum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> WeightedSpectrum<T> {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// Indicator of a point set: amplitude 1 on each given frequency.
    pub fn indicator<I: IntoIterator<Item = FreqPoint>>(points: I) -> Self {
        let mut s = Self::new();
        for p in points {
            s.set(p, Complex::new(T::one(), T::zero()));
        }
        s
    }

    /// Indicator of the box `[-n, n]^2`.
    pub fn indicator_box(n: i64) -> Result<Self> {
        if n < 0 {
            return Err(CoreError::validation("box half-width must be >= 0"));
        }
        let mut s = Self::new();
        for x in -n..=n {
            for y in -n..=n {
                s.set(FreqPoint::new(x, y)?, Complex::new(T::one(), T::zero()));
            }
        }
        Ok(s)
    }

    /// Sets the amplitude at `p`, removing the entry when it is exactly zero.
    /// Non-finite amplitudes are rejected.
    pub fn set(&mut self, p: FreqPoint, amp: Complex<T>) {
        assert!(
            amp.re.is_finite() && amp.im.is_finite(),
            "non-finite amplitude at {p}"
        );
        if amp.re.is_zero() && amp.im.is_zero() {
            self.entries.remove(&p);
        } else {
            self.entries.insert(p, amp);
        }
    }

    /// Sets a real amplitude at `p`.
    pub fn set_real(&mut self, p: FreqPoint, amp: T) {
        self.set(p, Complex::new(amp, T::zero()));
    }

    pub fn amplitude(&self, p: FreqPoint) -> Complex<T> {
        self.entries
            .get(&p)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn contains(&self, p: FreqPoint) -> bool {
        self.entries.contains_key(&p)
    }

    /// Number of frequencies in the support.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in lexicographic frequency order.
    pub fn iter(&self) -> impl Iterator<Item = (FreqPoint, Complex<T>)> + '_ {
        self.entries.iter().map(|(&p, &a)| (p, a))
    }

    /// Support in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = FreqPoint> + '_ {
        self.entries.keys().copied()
    }

    /// `Σ |f(ξ)|^2` over the support (the `ℓ^2` square, without the `(2π)^2`
    /// volume factor).
    pub fn l2_norm_sq(&self) -> T {
        let mut acc = crate::numeric::NeumaierSum::new();
        for (_, a) in self.iter() {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    pub fn l2_norm(&self) -> T {
        self.l2_norm_sq().sqrt()
    }

    /// `L^2(T^2)` norm of the synthesized function: `2π · ‖f‖_{ℓ^2}`.
    pub fn l2_function_norm(&self) -> T {
        T::two_pi() * self.l2_norm()
    }

    /// Largest coordinate magnitude in the support; `0` for the empty
    /// spectrum.
    pub fn max_abs_coord(&self) -> i64 {
        self.support().map(|p| p.max_abs_coord()).max().unwrap_or(0)
    }

    /// Largest squared norm in the support; `0` for the empty spectrum.
    pub fn max_norm_sq(&self) -> i64 {
        self.support().map(|p| p.norm_sq()).max().unwrap_or(0)
    }

    /// Splits the spectrum into the part inside a region and the rest.
    /// Amplitudes are moved verbatim, so the two parts reassemble exactly.
    pub fn split(&self, region: &Region) -> (Self, Self) {
        let mut inside = Self::new();
        let mut outside = Self::new();
        for (p, a) in self.iter() {
            if region.contains(p) {
                inside.entries.insert(p, a);
            } else {
                outside.entries.insert(p, a);
            }
        }
        (inside, outside)
    }

    /// Restriction to a region (a sharp Fourier projection).
    pub fn project(&self, region: &Region) -> Self {
        self.split(region).0
    }

    /// Restriction by predicate; used by the exceptional-set iteration.
    pub fn restrict<F: Fn(FreqPoint) -> bool>(&self, keep: F) -> Self {
        let mut s = Self::new();
        for (p, a) in self.iter() {
            if keep(p) {
                s.entries.insert(p, a);
            }
        }
        s
    }

    /// Merges a spectrum with disjoint support into this one; errors if the
    /// supports overlap.
    pub fn merge_disjoint(&mut self, other: &Self) -> Result<()> {
        for (p, a) in other.iter() {
            if self.entries.insert(p, a).is_some() {
                return Err(CoreError::validation(format!(
                    "merge_disjoint: duplicate frequency {p}"
                )));
            }
        }
        Ok(())
    }

    /// Validates that every amplitude is nonnegative real and returns the
    /// `(frequency, value)` pairs in canonical order. Counting operations
    /// call this at their boundary.
    pub fn nonnegative_entries(&self) -> Result<Vec<(FreqPoint, T)>> {
        let mut out = Vec::with_capacity(self.entries.len());
        for (p, a) in self.iter() {
            if !a.im.is_zero() || a.re < T::zero() {
                return Err(CoreError::validation(format!(
                    "amplitude at {p} must be nonnegative real for counting, got {a}"
                )));
            }
            out.push((p, a.re));
        }
        Ok(out)
    }

    // ---- text and JSON interchange --------------------------------------

    /// Parses the plain-text spectrum format: one `x y re [im]` entry per
    /// line, `#` starts a comment, blank lines ignored, duplicate
    /// frequencies rejected.
    pub fn parse_text(input: &str) -> Result<Self> {
        let mut s = Self::new();
        for (idx, raw) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 3 || fields.len() > 4 {
                return Err(CoreError::Parse {
                    line: line_no,
                    msg: format!("expected `x y re [im]`, got {} fields", fields.len()),
                });
            }
            let parse_int = |t: &str, what: &str| -> Result<i64> {
                t.parse::<i64>().map_err(|e| CoreError::Parse {
                    line: line_no,
                    msg: format!("bad {what} `{t}`: {e}"),
                })
            };
            let parse_float = |t: &str, what: &str| -> Result<T> {
                let v: f64 = t.parse().map_err(|e| CoreError::Parse {
                    line: line_no,
                    msg: format!("bad {what} `{t}`: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(CoreError::Parse {
                        line: line_no,
                        msg: format!("{what} must be finite"),
                    });
                }
                Ok(T::from_f64c(v))
            };
            let x = parse_int(fields[0], "x coordinate")?;
            let y = parse_int(fields[1], "y coordinate")?;
            let re = parse_float(fields[2], "real part")?;
            let im = if fields.len() == 4 {
                parse_float(fields[3], "imaginary part")?
            } else {
                T::zero()
            };
            let p = FreqPoint::new(x, y).map_err(|e| CoreError::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            if s.contains(p) {
                return Err(CoreError::Parse {
                    line: line_no,
                    msg: format!("duplicate frequency {p}"),
                });
            }
            s.set(p, Complex::new(re, im));
        }
        Ok(s)
    }

    /// Writes the plain-text format; the imaginary column is emitted only
    /// when some entry is non-real.
    pub fn to_text(&self) -> String {
        let complex = self.iter().any(|(_, a)| !a.im.is_zero());
        let mut out = String::new();
        for (p, a) in self.iter() {
            if complex {
                out.push_str(&format!("{} {} {:e} {:e}\n", p.x, p.y, a.re, a.im));
            } else {
                out.push_str(&format!("{} {} {:e}\n", p.x, p.y, a.re));
            }
        }
        out
    }

    /// JSON export: an array of `{x, y, re, im}` objects in canonical order.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .iter()
            .map(|(p, a)| {
                serde_json::json!({
                    "x": p.x,
                    "y": p.y,
                    "re": a.re.to_f64().unwrap_or(f64::NAN),
                    "im": a.im.to_f64().unwrap_or(f64::NAN),
                })
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("spectrum serializes")
    }
}

/// An axis-aligned dyadic cube of the partition
/// `{(0, N]^2 + N ξ_0 : ξ_0 ∈ Z^2}` of the frequency plane.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CubeProjection {
    side: i64,
    anchor: FreqPoint,
}

impl CubeProjection {
    /// Cube `(0, N]^2 + N·anchor`; `N` must be a positive power of two.
    pub fn new(side: i64, anchor: FreqPoint) -> Result<Self> {
        if side <= 0 || (side as u64) & (side as u64 - 1) != 0 {
            return Err(CoreError::validation(format!(
                "cube side must be a positive power of two, got {side}"
            )));
        }
        Ok(Self { side, anchor })
    }

    /// The unique cube of side `N` containing `p`: the partition tiles the
    /// lattice exactly, with each cube owning its upper-right closed edge.
    pub fn containing(p: FreqPoint, side: i64) -> Result<Self> {
        let anchor = FreqPoint::new(
            (p.x - 1).div_euclid(side),
            (p.y - 1).div_euclid(side),
        )?;
        Self::new(side, anchor)
    }

    pub fn side(&self) -> i64 {
        self.side
    }

    pub fn anchor(&self) -> FreqPoint {
        self.anchor
    }

    pub fn contains(&self, p: FreqPoint) -> bool {
        let dx = p.x - self.side * self.anchor.x;
        let dy = p.y - self.side * self.anchor.y;
        0 < dx && dx <= self.side && 0 < dy && dy <= self.side
    }
}

/// Frequency regions a spectrum can be projected onto.
#[derive(Clone, Debug)]
pub enum Region {
    /// An explicit finite point set.
    Points(std::collections::BTreeSet<FreqPoint>),
    /// A cube of the dyadic partition.
    Cube(CubeProjection),
    /// The box `[-n, n]^2`.
    Box { half_width: i64 },
}

impl Region {
    pub fn points<I: IntoIterator<Item = FreqPoint>>(points: I) -> Self {
        Region::Points(points.into_iter().collect())
    }

    pub fn contains(&self, p: FreqPoint) -> bool {
        match self {
            Region::Points(set) => set.contains(&p),
            Region::Cube(c) => c.contains(p),
            Region::Box { half_width } => {
                p.x.abs() <= *half_width && p.y.abs() <= *half_width
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fp;

    fn chi(points: &[(i64, i64)]) -> WeightedSpectrum<f64> {
        WeightedSpectrum::indicator(points.iter().map(|&(x, y)| fp(x, y)))
    }

    #[test]
    fn zero_amplitudes_are_not_stored() {
        let mut s: WeightedSpectrum<f64> = WeightedSpectrum::new();
        s.set_real(fp(1, 2), 3.0);
        s.set_real(fp(1, 2), 0.0);
        assert!(s.is_empty());
    }

    #[test]
    fn cube_partition_tiles_the_lattice() {
        // Every point lands in exactly one cube of each dyadic side.
        for side in [1i64, 2, 4, 8] {
            for x in -9..=9 {
                for y in -9..=9 {
                    let p = fp(x, y);
                    let c = CubeProjection::containing(p, side).unwrap();
                    assert!(c.contains(p), "side {side} point {p}");
                    // neighbors of the anchor do not also contain p
                    for ax in -1..=1 {
                        for ay in -1..=1 {
                            if (ax, ay) == (0, 0) {
                                continue;
                            }
                            let other = CubeProjection::new(
                                side,
                                fp(c.anchor().x + ax, c.anchor().y + ay),
                            )
                            .unwrap();
                            assert!(!other.contains(p));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cube_of_side_two_at_origin() {
        // (0,2]^2 anchored at the origin contains exactly {1,2}^2.
        let c = CubeProjection::new(2, fp(0, 0)).unwrap();
        let s: WeightedSpectrum<f64> = WeightedSpectrum::indicator_box(2).unwrap();
        let inside = s.project(&Region::Cube(c));
        let got: Vec<FreqPoint> = inside.support().collect();
        assert_eq!(got, vec![fp(1, 1), fp(1, 2), fp(2, 1), fp(2, 2)]);
    }

    #[test]
    fn projection_is_idempotent_and_preserves_amplitudes() {
        let s = chi(&[(0, 0), (1, 0), (5, -3)]);
        let region = Region::points([fp(1, 0), fp(5, -3), fp(9, 9)]);
        let p1 = s.project(&region);
        let p2 = p1.project(&region);
        assert_eq!(p1, p2);
        assert_eq!(p1.support_size(), 2);
        assert_eq!(p1.amplitude(fp(1, 0)).re, 1.0);
    }

    #[test]
    fn split_satisfies_pythagoras_exactly_for_moved_amplitudes() {
        let mut s: WeightedSpectrum<f64> = WeightedSpectrum::new();
        for (i, (x, y)) in [(0, 0), (3, 1), (-2, 5), (7, 7), (-4, -4)].iter().enumerate() {
            s.set(fp(*x, *y), Complex::new(0.3 + i as f64, 0.1 * i as f64));
        }
        let region = Region::Box { half_width: 3 };
        let (a, b) = s.split(&region);
        assert_eq!(a.support_size() + b.support_size(), s.support_size());
        let total = s.l2_norm_sq();
        let parts = a.l2_norm_sq() + b.l2_norm_sq();
        assert!((total - parts).abs() <= 1e-12 * total);
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let text = "# demo spectrum\n0 0 1.0\n1 0 0.5 -0.25\n\n2 -3 2e-1 # trailing comment\n";
        let s: WeightedSpectrum<f64> = WeightedSpectrum::parse_text(text).unwrap();
        assert_eq!(s.support_size(), 3);
        assert_eq!(s.amplitude(fp(1, 0)), Complex::new(0.5, -0.25));
        let reparsed: WeightedSpectrum<f64> =
            WeightedSpectrum::parse_text(&s.to_text()).unwrap();
        assert_eq!(s, reparsed);

        let dup = "0 0 1\n0 0 2\n";
        match WeightedSpectrum::<f64>::parse_text(dup) {
            Err(CoreError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(WeightedSpectrum::<f64>::parse_text("1 2\n").is_err());
        assert!(WeightedSpectrum::<f64>::parse_text("1 2 x\n").is_err());
    }

    #[test]
    fn json_export_shape() {
        let s = chi(&[(0, 1)]);
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v[0]["x"], 0);
        assert_eq!(v[0]["y"], 1);
        assert_eq!(v[0]["re"], 1.0);
        assert_eq!(v[0]["im"], 0.0);
    }

    #[test]
    fn nonnegative_gate_rejects_complex_amplitudes() {
        let mut s: WeightedSpectrum<f64> = WeightedSpectrum::new();
        s.set(fp(0, 0), Complex::new(1.0, 0.5));
        assert!(s.nonnegative_entries().is_err());
        s.set(fp(0, 0), Complex::new(-1.0, 0.0));
        assert!(s.nonnegative_entries().is_err());
        s.set(fp(0, 0), Complex::new(1.0, 0.0));
        assert_eq!(s.nonnegative_entries().unwrap(), vec![(fp(0, 0), 1.0)]);
    }
}
