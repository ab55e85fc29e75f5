//! Descent-type statistics on a single permutation.

mod local;

pub use local::{LocalPair, LocalStatistic, PatternTable, MAX_DEGREE, MAX_EXACT_MOMENT_DEGREE};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Descent indicators `X_i = 1` iff `π(i+1) < π(i)`, for `i = 1, ..., n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentVector(pub Vec<u8>);

impl DescentVector {
    pub fn total(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }
}

/// Number of descents `D(π)`.
pub fn descents(p: &Permutation) -> usize {
    descents_of(p.as_zero_based())
}

pub(crate) fn descents_of(values: &[usize]) -> usize {
    values.windows(2).filter(|w| w[1] < w[0]).count()
}

pub fn descent_vector(p: &Permutation) -> DescentVector {
    DescentVector(
        p.as_zero_based()
            .windows(2)
            .map(|w| u8::from(w[1] < w[0]))
            .collect(),
    )
}

/// `T(π) = D(π) + D(π⁻¹)`.
pub fn t_statistic(p: &Permutation) -> usize {
    descents(p) + descents(&p.inverse())
}

/// Interior peaks: positions `2 <= i <= n-1` with `π(i-1) < π(i) > π(i+1)`.
pub fn peaks(p: &Permutation) -> usize {
    peaks_of(p.as_zero_based())
}

pub(crate) fn peaks_of(values: &[usize]) -> usize {
    values
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .count()
}

/// Relative order of a window of distinct values, as a permutation of `{1..k}`.
pub fn pattern_of<T: Ord>(window: &[T]) -> Result<Permutation> {
    if window.is_empty() {
        return Err(Error::InvalidSize("empty window".into()));
    }
    let mut order: Vec<usize> = (0..window.len()).collect();
    order.sort_by(|&a, &b| window[a].cmp(&window[b]));
    if order.windows(2).any(|w| window[w[0]] == window[w[1]]) {
        return Err(Error::DuplicateValues);
    }
    let mut ranks = vec![0; window.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r;
    }
    Ok(Permutation::from_zero_based_unchecked(ranks))
}

/// Inversions, cycle count and longest increasing subsequence length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuxStatistics {
    pub inversions: u64,
    pub cycle_count: usize,
    pub lis_length: usize,
}

pub fn aux_statistics(p: &Permutation) -> AuxStatistics {
    AuxStatistics {
        inversions: inversions(p),
        cycle_count: cycle_count(p),
        lis_length: lis_length(p),
    }
}

/// `|{(i, j) : i < j, π(i) > π(j)}|` with a Fenwick tree, `O(n log n)`.
pub fn inversions(p: &Permutation) -> u64 {
    let values = p.as_zero_based();
    let n = values.len();
    let mut tree = vec![0u32; n + 1];
    let mut total = 0u64;
    for (seen, &v) in values.iter().enumerate() {
        // Count earlier values <= v.
        let mut i = v + 1;
        let mut not_greater = 0u64;
        while i > 0 {
            not_greater += tree[i] as u64;
            i &= i - 1;
        }
        total += seen as u64 - not_greater;
        let mut i = v + 1;
        while i <= n {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    total
}

pub fn cycle_count(p: &Permutation) -> usize {
    let values = p.as_zero_based();
    let mut visited = vec![false; values.len()];
    let mut cycles = 0;
    for start in 0..values.len() {
        if visited[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            i = values[i];
        }
    }
    cycles
}

/// Patience sorting: `tails[l]` is the smallest tail of an increasing
/// subsequence of length `l + 1` seen so far.
pub fn lis_length(p: &Permutation) -> usize {
    let mut tails: Vec<usize> = Vec::with_capacity(p.len());
    for &v in p.as_zero_based() {
        let pos = tails.partition_point(|&t| t < v);
        if pos == tails.len() {
            tails.push(v);
        } else {
            tails[pos] = v;
        }
    }
    tails.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::enumerate;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn descent_examples() {
        assert_eq!(descents(&p("7 1 5 3 10 8 6 2 4 9")), 5);
        assert_eq!(descents(&Permutation::identity(6).unwrap()), 0);
        assert_eq!(descents(&p("2 4 1 3")), 1);
        assert_eq!(descents(&p("3 1 4 2")), 2);
        assert_eq!(descents(&p("1")), 0);
    }

    #[test]
    fn descent_vector_examples() {
        assert_eq!(descent_vector(&p("2 1 3")).0, vec![1, 0]);
        assert_eq!(descent_vector(&p("3 2 1")).0, vec![1, 1]);
        assert_eq!(descent_vector(&p("2 4 1 3")).0, vec![0, 1, 0]);
        assert!(descent_vector(&p("1")).0.is_empty());
    }

    #[test]
    fn t_examples() {
        assert_eq!(t_statistic(&Permutation::identity(4).unwrap()), 0);
        assert_eq!(t_statistic(&p("2 1")), 2);
        assert_eq!(t_statistic(&p("2 4 1 3")), 3);
    }

    #[test]
    fn peak_examples() {
        assert_eq!(peaks(&p("1 3 2")), 1);
        assert_eq!(peaks(&Permutation::identity(5).unwrap()), 0);
        assert_eq!(peaks(&p("2 4 1 5 3")), 2);
        assert_eq!(peaks(&p("2 1")), 0);
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(pattern_of(&[10, 3, 7]).unwrap(), p("3 1 2"));
        assert!(pattern_of(&[1, 4, 9, 12]).unwrap().is_identity());
        assert_eq!(pattern_of(&[9, 4, 1]).unwrap(), p("3 2 1"));
        assert!(matches!(pattern_of(&[1, 5, 1]), Err(Error::DuplicateValues)));
    }

    #[test]
    fn aux_examples() {
        let id = Permutation::identity(5).unwrap();
        assert_eq!(
            aux_statistics(&id),
            AuxStatistics {
                inversions: 0,
                cycle_count: 5,
                lis_length: 5
            }
        );
        assert_eq!(
            aux_statistics(&p("2 1 3")),
            AuxStatistics {
                inversions: 1,
                cycle_count: 2,
                lis_length: 2
            }
        );
        assert_eq!(
            aux_statistics(&Permutation::reversal(4).unwrap()),
            AuxStatistics {
                inversions: 6,
                cycle_count: 2,
                lis_length: 1
            }
        );
    }

    fn lis_quadratic(values: &[usize]) -> usize {
        let mut best = vec![1usize; values.len()];
        for j in 0..values.len() {
            for i in 0..j {
                if values[i] < values[j] {
                    best[j] = best[j].max(best[i] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    fn inversions_quadratic(values: &[usize]) -> u64 {
        let mut c = 0;
        for j in 0..values.len() {
            for i in 0..j {
                c += u64::from(values[i] > values[j]);
            }
        }
        c
    }

    #[test]
    fn exhaustive_small_n_properties() {
        for n in 1..=8 {
            for q in enumerate(n).unwrap() {
                let d = descents(&q);
                assert!(d < n);
                assert_eq!(descents(&q.reversed()), n - 1 - d);
                assert_eq!(lis_length(&q), lis_quadratic(q.as_zero_based()));
                assert_eq!(inversions(&q), inversions_quadratic(q.as_zero_based()));
                assert_eq!(descent_vector(&q).total(), d);
                if n <= 6 {
                    assert_eq!(t_statistic(&q), t_statistic(&q.inverse()));
                }
                if n == 3 {
                    assert_eq!(d, descents(&q.inverse()));
                }
            }
        }
    }
}
