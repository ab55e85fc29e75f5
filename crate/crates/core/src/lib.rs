//! Descent statistics on permutations.
//!
//! Exact laws for descents and `T(π) = D(π) + D(π⁻¹)`, rank metrics on `S_n`,
//! and Monte Carlo tools for permutations induced by random point sets.

pub mod error;
pub mod exact;
pub mod lab;
pub mod metrics;
pub mod normal;
pub mod perm;
pub mod points;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use perm::Permutation;
pub use points::{from_points, sample_from_points, Point, PointConfiguration};
pub use rng::SeededRng;
pub use lab::Statistic;
pub use stats::{descents, t_statistic, LocalPair, LocalStatistic};
