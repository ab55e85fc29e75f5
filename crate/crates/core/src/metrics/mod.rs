//! Distances between permutations of the same size.
//!
//! All metrics here are integer valued. Spearman's rho is reported squared
//! (`Σ (p(i) - q(i))²`); take the square root for the Euclidean form.
//!
//! Composition conventions, with `compose(a, b)(i) = a(b(i))`:
//!
//! | kind           | value                                   |
//! |----------------|-----------------------------------------|
//! | `kendall`      | inversions of `q ∘ p⁻¹`                 |
//! | `cayley`       | `n - cycles(q ∘ p⁻¹)`                   |
//! | `ulam`         | `n - lis(p ∘ q⁻¹)`                      |
//! | `descent_edge` | `D(p ∘ q⁻¹) + D(q ∘ p⁻¹)`               |
//! | `descent_graph`| shortest path with `descent_edge` weights (see [`graph`]) |

pub mod graph;
mod violations;

pub use graph::{descent_graph_distance, DescentGraph, GRAPH_CAP};
pub use violations::{search_triangle_violations, Violation, ViolationReport, VIOLATION_CAP};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rng::SeededRng;
use crate::stats::{cycle_count, descents, inversions, lis_length};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Footrule,
    RhoSquared,
    Kendall,
    Cayley,
    Hamming,
    Ulam,
    DescentEdge,
    DescentGraph,
}

impl MetricKind {
    pub const ALL: [MetricKind; 8] = [
        Self::Footrule,
        Self::RhoSquared,
        Self::Kendall,
        Self::Cayley,
        Self::Hamming,
        Self::Ulam,
        Self::DescentEdge,
        Self::DescentGraph,
    ];

    /// The six rank metrics with closed-form distances.
    pub const CLASSICAL: [MetricKind; 6] = [
        Self::Footrule,
        Self::RhoSquared,
        Self::Kendall,
        Self::Cayley,
        Self::Hamming,
        Self::Ulam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Footrule => "footrule",
            Self::RhoSquared => "rho_squared",
            Self::Kendall => "kendall",
            Self::Cayley => "cayley",
            Self::Hamming => "hamming",
            Self::Ulam => "ulam",
            Self::DescentEdge => "descent_edge",
            Self::DescentGraph => "descent_graph",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown metric {s:?}")))
    }
}

fn same_size(p: &Permutation, q: &Permutation) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// `d_kind(p, q)` for every kind except `descent_graph`, which has its own
/// entry point because it needs the whole of `S_n`.
pub fn distance(kind: MetricKind, p: &Permutation, q: &Permutation) -> Result<u64> {
    same_size(p, q)?;
    let n = p.len() as u64;
    let (a, b) = (p.as_zero_based(), q.as_zero_based());
    Ok(match kind {
        MetricKind::Footrule => a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y) as u64).sum(),
        MetricKind::RhoSquared => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x.abs_diff(y) as u64).pow(2))
            .sum(),
        MetricKind::Hamming => a.iter().zip(b).filter(|(x, y)| x != y).count() as u64,
        MetricKind::Kendall => inversions(&q.compose(&p.inverse())?),
        MetricKind::Cayley => n - cycle_count(&q.compose(&p.inverse())?) as u64,
        MetricKind::Ulam => n - lis_length(&p.compose(&q.inverse())?) as u64,
        MetricKind::DescentEdge => {
            let g = p.compose(&q.inverse())?;
            (descents(&g) + descents(&g.inverse())) as u64
        }
        MetricKind::DescentGraph => {
            return Err(Error::InvalidArgument(
                "descent_graph distances come from descent_graph_distance".into(),
            ))
        }
    })
}

/// Any kind, routing `descent_graph` through the cached shortest-path table.
pub fn distance_any(kind: MetricKind, p: &Permutation, q: &Permutation) -> Result<u64> {
    match kind {
        MetricKind::DescentGraph => descent_graph_distance(p, q),
        _ => distance(kind, p, q),
    }
}

/// Outcome of a randomized invariance test; any counterexample makes the
/// corresponding flag false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub kind: MetricKind,
    pub n: usize,
    pub trials: usize,
    pub right_invariant: bool,
    pub left_invariant: bool,
}

pub const DEFAULT_INVARIANCE_N: usize = 8;

/// Tests `d(π, σ) = d(πη, ση)` (right) and `d(π, σ) = d(ηπ, ησ)` (left) on
/// `trials` random triples from `S_n`.
pub fn invariance_check(
    kind: MetricKind,
    n: usize,
    trials: usize,
    rng: &mut SeededRng,
) -> Result<InvarianceReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut right = true;
    let mut left = true;
    for _ in 0..trials {
        let pi = Permutation::sample_uniform(n, rng)?;
        let sigma = Permutation::sample_uniform(n, rng)?;
        let eta = Permutation::sample_uniform(n, rng)?;
        let d = distance_any(kind, &pi, &sigma)?;
        right &= d == distance_any(kind, &pi.compose(&eta)?, &sigma.compose(&eta)?)?;
        left &= d == distance_any(kind, &eta.compose(&pi)?, &eta.compose(&sigma)?)?;
        if !right && !left {
            break;
        }
    }
    Ok(InvarianceReport {
        kind,
        n,
        trials,
        right_invariant: right,
        left_invariant: left,
    })
}
