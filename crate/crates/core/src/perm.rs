//! Permutations of `{1, ..., n}` in one-line notation.
//!
//! Externally every permutation is written 1-based (`"2 4 1 3"` means
//! `π(1) = 2, π(2) = 4, ...`). Internally entries are stored 0-based.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Default upper bound on `n` for exhaustive enumeration of `S_n`.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// A bijection of `{1, ..., n}`, `n >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    // 0-based images: entry `i` holds `π(i + 1) - 1`.
    entries: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from 1-based one-line notation.
    pub fn new(one_line: Vec<usize>) -> Result<Self> {
        let n = one_line.len();
        if n == 0 {
            return Err(Error::InvalidSize("a permutation needs n >= 1".into()));
        }
        let mut seen = vec![false; n];
        for &v in &one_line {
            if v == 0 || v > n {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("entry {v} out of range"),
                });
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("entry {v} repeated"),
                });
            }
        }
        Ok(Self {
            entries: one_line.into_iter().map(|v| v - 1).collect(),
        })
    }

    /// Builds a permutation from 0-based images.
    pub fn from_zero_based(entries: Vec<usize>) -> Result<Self> {
        Self::new(entries.into_iter().map(|v| v + 1).collect())
    }

    /// Caller guarantees `entries` is a 0-based bijection.
    pub(crate) fn from_zero_based_unchecked(entries: Vec<usize>) -> Self {
        debug_assert!(is_bijection(&entries));
        Self { entries }
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("identity requires n >= 1".into()));
        }
        Ok(Self {
            entries: (0..n).collect(),
        })
    }

    /// `(n, n-1, ..., 1)`.
    pub fn reversal(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("reversal requires n >= 1".into()));
        }
        Ok(Self {
            entries: (0..n).rev().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `π(i)` with 1-based `i`.
    pub fn get(&self, i: usize) -> Option<usize> {
        i.checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .map(|v| v + 1)
    }

    /// 0-based images.
    pub fn as_zero_based(&self) -> &[usize] {
        &self.entries
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.entries.iter().map(|v| v + 1).collect()
    }

    /// The permutation `q` with `q(p(i)) = i`.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.entries.len()];
        for (i, &v) in self.entries.iter().enumerate() {
            inv[v] = i;
        }
        Self { entries: inv }
    }

    /// `r(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            entries: other.entries.iter().map(|&j| self.entries[j]).collect(),
        })
    }

    /// Positions read right to left: `i -> π(n + 1 - i)`.
    pub fn reversed(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.reverse();
        Self { entries }
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// 0-based position of this permutation in the lexicographic listing of `S_n`.
    ///
    /// Only defined for `n <= 20` so the rank fits in a `u64`.
    pub fn lex_rank(&self) -> u64 {
        let n = self.len();
        assert!(n <= 20, "lex_rank is limited to n <= 20");
        let mut used: u32 = 0;
        let mut rank = 0u64;
        for (i, &v) in self.entries.iter().enumerate() {
            let smaller_unused = v as u32 - (used & ((1u32 << v) - 1)).count_ones();
            rank = rank * (n - i) as u64 + smaller_unused as u64;
            used |= 1 << v;
        }
        rank
    }

    /// Uniform random permutation by Fisher-Yates shuffling.
    pub fn sample_uniform(n: usize, rng: &mut SeededRng) -> Result<Self> {
        let mut p = Self::identity(n)?;
        p.entries.shuffle(rng);
        Ok(p)
    }
}

pub(crate) fn is_bijection(entries: &[usize]) -> bool {
    let mut seen = vec![false; entries.len()];
    entries
        .iter()
        .all(|&v| v < seen.len() && !std::mem::replace(&mut seen[v], true))
}

/// All of `S_n` in lexicographic order, refusing sizes above the default cap.
pub fn enumerate(n: usize) -> Result<impl Iterator<Item = Permutation>> {
    enumerate_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_with_cap(n: usize, cap: usize) -> Result<impl Iterator<Item = Permutation>> {
    if n == 0 {
        return Err(Error::InvalidSize("enumeration requires n >= 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "enumeration",
            n,
            cap,
        });
    }
    Ok((0..n)
        .permutations(n)
        .map(Permutation::from_zero_based_unchecked))
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.entries.iter().map(|v| v + 1).join(" "))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses space-separated one-line notation; commas and surrounding
    /// parentheses are tolerated.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let values = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn identity_examples() {
        assert_eq!(Permutation::identity(3).unwrap(), p("1 2 3"));
        assert_eq!(Permutation::identity(1).unwrap(), p("1"));
        assert_eq!(Permutation::identity(5).unwrap(), p("1 2 3 4 5"));
        assert!(matches!(
            Permutation::identity(0),
            Err(Error::InvalidSize(_))
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p("2 4 1 3").inverse(), p("3 1 4 2"));
        assert_eq!(p("1 2 3").inverse(), p("1 2 3"));
        assert_eq!(p("3 1 2").inverse(), p("2 3 1"));
    }

    #[test]
    fn compose_examples() {
        let a = p("2 1 3");
        let b = p("3 1 2");
        assert_eq!(a.compose(&b).unwrap(), p("3 2 1"));
        let q = p("2 4 1 3");
        let id = Permutation::identity(4).unwrap();
        assert_eq!(q.compose(&q.inverse()).unwrap(), id);
        assert_eq!(id.compose(&q).unwrap(), q);
        assert!(matches!(
            a.compose(&q),
            Err(Error::SizeMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!("1 1 2".parse::<Permutation>().is_err());
        assert!("0 1 2".parse::<Permutation>().is_err());
        assert!("1 2 4".parse::<Permutation>().is_err());
        assert!("".parse::<Permutation>().is_err());
        assert!("1 x".parse::<Permutation>().is_err());
    }

    #[test]
    fn text_format() {
        let q = p("(2, 4, 1, 3)");
        assert_eq!(q.to_string(), "2 4 1 3");
        assert_eq!(q.get(2), Some(4));
        assert_eq!(q.get(0), None);
        assert_eq!(q.get(5), None);
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let two: Vec<_> = enumerate(2).unwrap().collect();
        assert_eq!(two, vec![p("1 2"), p("2 1")]);
        assert_eq!(enumerate(3).unwrap().count(), 6);
        assert_eq!(enumerate(8).unwrap().count(), 40320);
        let all: Vec<_> = enumerate(5).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (i, q) in all.iter().enumerate() {
            assert_eq!(q.lex_rank(), i as u64);
        }
        assert!(matches!(
            enumerate(11),
            Err(Error::CapExceeded { n: 11, cap: 10, .. })
        ));
        assert_eq!(enumerate_with_cap(11, 11).unwrap().take(3).count(), 3);
    }

    #[test]
    fn inverse_is_involution_exhaustive() {
        for n in 1..=6 {
            let id = Permutation::identity(n).unwrap();
            for q in enumerate(n).unwrap() {
                assert_eq!(q.inverse().inverse(), q);
                assert_eq!(q.compose(&q.inverse()).unwrap(), id);
            }
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let draw = |seed| {
            let mut rng = SeededRng::new(seed);
            (0..20)
                .map(|_| Permutation::sample_uniform(9, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
        let mut rng = SeededRng::new(3);
        assert_eq!(Permutation::sample_uniform(1, &mut rng).unwrap(), p("1"));
    }

    #[test]
    fn uniform_sampling_chi_square_s3() {
        // 60000 draws over the 6 elements of S_3; each count should be
        // 10000 +- 400 (4 binomial standard deviations is ~365).
        let mut rng = SeededRng::new(2024);
        let mut counts = [0usize; 6];
        for _ in 0..60_000 {
            let q = Permutation::sample_uniform(3, &mut rng).unwrap();
            counts[q.lex_rank() as usize] += 1;
        }
        for c in counts {
            assert!((9600..=10400).contains(&c), "count {c}");
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - 10_000.0).powi(2) / 10_000.0)
            .sum();
        // 5 degrees of freedom: mean 5, sd sqrt(10); 4 sd above the mean.
        assert!(chi2 < 5.0 + 4.0 * 10f64.sqrt(), "chi2 = {chi2}");
    }

    proptest::proptest! {
        #[test]
        fn inverse_roundtrip_large(seed in 0u64..1000, n in 1usize..10_000) {
            let mut rng = SeededRng::new(seed);
            let q = Permutation::sample_uniform(n, &mut rng).unwrap();
            proptest::prop_assert_eq!(q.inverse().inverse(), q.clone());
            proptest::prop_assert!(q.compose(&q.inverse()).unwrap().is_identity());
        }

        #[test]
        fn display_parse_roundtrip(seed in 0u64..1000, n in 1usize..50) {
            let mut rng = SeededRng::new(seed);
            let q = Permutation::sample_uniform(n, &mut rng).unwrap();
            proptest::prop_assert_eq!(q.to_string().parse::<Permutation>().unwrap(), q);
        }
    }
}
