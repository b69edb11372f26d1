//! Frequency-set specifiers shared by every subcommand.
//!
//! A set on the command line is one of
//!
//! ```text
//! grid:N            χ on [−N, N]² ∩ Z², unit amplitudes
//! file:PATH         plain-text spectrum, one `x y re [im]` per line
//! random:n:seed[:R] n seeded points in [−R, R]², amplitudes in [1/8, 1]
//! ```
//!
//! Random sets draw from the same ChaCha8 stream as the library oracles, so
//! a `(n, seed, R)` triple names one reproducible spectrum everywhere. The
//! default radius is 64. Loading an empty set is a validation error: every
//! downstream functional is degenerate there, and a silent empty CSV hides
//! typos in `file:` paths.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use torus_stri_core::error::{CoreError, Result};
use torus_stri_core::pointset::PointSet;
use torus_stri_core::sampling::random_positive_spectrum;
use torus_stri_core::Spectrum;

/// Radius of `random:` sets when the `:R` suffix is omitted.
pub const DEFAULT_RANDOM_RADIUS: i64 = 64;

/// A parsed `--set` argument; [`SetSpec::load`] materializes the spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSpec {
    /// Indicator of the centered box `[−n, n]²`.
    Grid(i64),
    /// Plain-text spectrum file.
    File(PathBuf),
    /// Seeded random spectrum with nonnegative amplitudes.
    Random { n: usize, seed: u64, radius: i64 },
}

impl FromStr for SetSpec {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| {
            CoreError::validation(format!(
                "set spec `{s}` has no `kind:` prefix (expected grid:N, file:PATH, or random:n:seed[:R])"
            ))
        })?;
        match kind {
            "grid" => {
                let n: i64 = rest.parse().map_err(|e| {
                    CoreError::validation(format!("bad grid size `{rest}`: {e}"))
                })?;
                if n < 0 {
                    return Err(CoreError::validation(format!(
                        "grid size must be nonnegative, got {n}"
                    )));
                }
                Ok(SetSpec::Grid(n))
            }
            "file" => {
                if rest.is_empty() {
                    return Err(CoreError::validation("empty file path in set spec"));
                }
                Ok(SetSpec::File(PathBuf::from(rest)))
            }
            "random" => {
                let fields: Vec<&str> = rest.split(':').collect();
                if fields.len() < 2 || fields.len() > 3 {
                    return Err(CoreError::validation(format!(
                        "random spec needs n:seed[:R], got `{rest}`"
                    )));
                }
                let n: usize = fields[0].parse().map_err(|e| {
                    CoreError::validation(format!("bad point count `{}`: {e}", fields[0]))
                })?;
                let seed: u64 = fields[1].parse().map_err(|e| {
                    CoreError::validation(format!("bad seed `{}`: {e}", fields[1]))
                })?;
                let radius: i64 = match fields.get(2) {
                    Some(t) => t.parse().map_err(|e| {
                        CoreError::validation(format!("bad radius `{t}`: {e}"))
                    })?,
                    None => DEFAULT_RANDOM_RADIUS,
                };
                Ok(SetSpec::Random { n, seed, radius })
            }
            other => Err(CoreError::validation(format!(
                "unknown set kind `{other}` (expected grid, file, or random)"
            ))),
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::Grid(n) => write!(f, "grid:{n}"),
            SetSpec::File(p) => write!(f, "file:{}", p.display()),
            SetSpec::Random { n, seed, radius } => write!(f, "random:{n}:{seed}:{radius}"),
        }
    }
}

impl SetSpec {
    /// Materializes the spectrum; rejects empty results.
    pub fn load(&self) -> Result<Spectrum> {
        let f = match self {
            SetSpec::Grid(n) => Spectrum::indicator_box(*n)?,
            SetSpec::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CoreError::validation(format!("cannot read {}: {e}", path.display()))
                })?;
                Spectrum::parse_text(&text)?
            }
            SetSpec::Random { n, seed, radius } => {
                random_positive_spectrum(*seed, *n, *radius)?
            }
        };
        if f.is_empty() {
            return Err(CoreError::validation("empty spectrum"));
        }
        Ok(f)
    }

    /// The loaded spectrum's support as a point set.
    pub fn point_set(&self) -> Result<PointSet> {
        Ok(PointSet::new(self.load()?.support().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_three_forms() {
        assert_eq!("grid:8".parse::<SetSpec>().unwrap(), SetSpec::Grid(8));
        assert_eq!(
            "file:data/s.txt".parse::<SetSpec>().unwrap(),
            SetSpec::File(PathBuf::from("data/s.txt"))
        );
        assert_eq!(
            "random:40:7".parse::<SetSpec>().unwrap(),
            SetSpec::Random { n: 40, seed: 7, radius: DEFAULT_RANDOM_RADIUS }
        );
        assert_eq!(
            "random:40:7:8".parse::<SetSpec>().unwrap(),
            SetSpec::Random { n: 40, seed: 7, radius: 8 }
        );
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in [
            "grid", "grid:x", "grid:-1", "file:", "random:40", "random:a:1",
            "random:1:2:3:4", "lattice:3",
        ] {
            assert!(bad.parse::<SetSpec>().is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn grid_load_is_the_box_indicator() {
        let f = SetSpec::Grid(2).load().unwrap();
        assert_eq!(f.support_size(), 25);
        assert!(f.nonnegative_entries().is_ok());
    }

    #[test]
    fn random_load_is_reproducible_and_positive() {
        let spec = SetSpec::Random { n: 30, seed: 11, radius: 9 };
        let a = spec.load().unwrap();
        let b = spec.load().unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert!(a.nonnegative_entries().is_ok());
        assert_eq!(a.support_size(), 30);
    }

    #[test]
    fn empty_sets_are_rejected() {
        let err = SetSpec::Random { n: 0, seed: 1, radius: 4 }
            .load()
            .unwrap_err();
        assert!(err.to_string().contains("empty spectrum"), "{err}");
    }

    #[test]
    fn file_roundtrip_through_text_format() {
        let dir = std::env::temp_dir().join("torus-stri-setspec-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.txt");
        fs::write(&path, "0 0 1.0\n1 0 0.5\n").unwrap();
        let f = SetSpec::File(path.clone()).load().unwrap();
        assert_eq!(f.support_size(), 2);
        fs::write(&path, "# only comments\n").unwrap();
        let err = SetSpec::File(path).load().unwrap_err();
        assert!(err.to_string().contains("empty spectrum"));
    }
}
