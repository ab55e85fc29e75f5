//! Monte Carlo experiments for descent statistics, and executable checks of
//! the interaction-graph bounds on point configurations.
//!
//! Randomized work is cut into fixed-size blocks. Block `b` draws from its
//! own stream keyed by `(base, b)`, where `base` is one draw from the
//! caller's generator, and results are merged in block order. Output is
//! therefore identical for any rayon thread count.

pub mod empirical;
mod interaction;

pub use interaction::{
    build_graph, check_interaction_rule, degree_bound, delta_j, bound_scaling, bound_terms,
    InteractionGraph, InteractionOptions, InteractionReport, BoundRow, BoundScaling,
    BoundTerms, STATED_DELTA_BOUND,
};

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, formulas};
use crate::perm::Permutation;
use crate::points::{from_points, sample_from_points, PointConfiguration};
use crate::rng::{mix_seed, SeededRng};
use crate::stats::{descents_of, peaks_of, LocalPair, LocalStatistic};

/// A statistic `W = f(π, π⁻¹)` on uniform permutations.
#[derive(Debug, Clone, PartialEq)]
pub enum Statistic {
    /// `D(π)`.
    D,
    /// `D(π) + D(π⁻¹)`.
    T,
    /// Interior peaks of `π`.
    Peaks,
    /// `peaks(π) + peaks(π⁻¹)`.
    PeaksPair,
    Local(LocalPair),
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Self::D => "D",
            Self::T => "T",
            Self::Peaks => "peaks",
            Self::PeaksPair => "peaks_pair",
            Self::Local(_) => "local",
        }
    }

    /// Window length `k` of the local form.
    pub fn degree(&self) -> usize {
        match self {
            Self::D | Self::T => 2,
            Self::Peaks | Self::PeaksPair => 3,
            Self::Local(pair) => pair.degree(),
        }
    }

    pub fn is_integer_valued(&self) -> bool {
        match self {
            Self::Local(pair) => pair.is_integer_valued(),
            _ => true,
        }
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        match self {
            Self::Local(pair) => pair.check_size(n),
            _ if n == 0 => Err(Error::InvalidSize("n must be >= 1".into())),
            _ => Ok(()),
        }
    }

    /// `f(π, π⁻¹)`; sizes are assumed checked.
    pub fn eval_pair(&self, p: &Permutation, p_inv: &Permutation) -> f64 {
        let (a, b) = (p.as_zero_based(), p_inv.as_zero_based());
        match self {
            Self::D => descents_of(a) as f64,
            Self::T => (descents_of(a) + descents_of(b)) as f64,
            Self::Peaks => peaks_of(a) as f64,
            Self::PeaksPair => (peaks_of(a) + peaks_of(b)) as f64,
            Self::Local(pair) => pair.eval_unchecked(p, p_inv),
        }
    }

    pub fn eval(&self, p: &Permutation) -> Result<f64> {
        self.check_size(p.len())?;
        Ok(self.eval_pair(p, &p.inverse()))
    }

    /// `f` applied to the rank permutations of a configuration.
    pub fn eval_points(&self, cfg: &PointConfiguration) -> f64 {
        let (p, p_inv) = from_points(cfg);
        self.eval_pair(&p, &p_inv)
    }

    /// Exact mean and variance on uniform `S_n` when they are available in
    /// closed form or by local enumeration.
    pub fn exact_moments(&self, n: usize) -> Result<Option<(f64, f64, String, String)>> {
        let show = |m: &num_rational::BigRational, v: &num_rational::BigRational| {
            Some((
                m.to_f64().unwrap_or(f64::NAN),
                v.to_f64().unwrap_or(f64::NAN),
                format_rational(m),
                format_rational(v),
            ))
        };
        let n_i = n as i64;
        Ok(match self {
            Self::D if n >= 2 => show(&formulas::descent_mean(n_i), &formulas::descent_variance(n_i)),
            Self::T if n >= 2 => show(&formulas::t_mean(n_i), &formulas::t_variance(n_i)),
            Self::Peaks if n >= 3 => {
                let m = LocalStatistic::peaks().exact_moments(n)?;
                show(&m.mean, &m.variance)
            }
            Self::Local(LocalPair {
                forward: Some(side),
                inverse: None,
            })
            | Self::Local(LocalPair {
                forward: None,
                inverse: Some(side),
            }) if side.degree() <= crate::stats::MAX_EXACT_MOMENT_DEGREE => {
                let m = side.exact_moments(n)?;
                show(&m.mean, &m.variance)
            }
            _ => None,
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses the built-in names; local statistics are loaded with
/// [`LocalPair::from_json`] and wrapped in [`Statistic::Local`].
impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "D" | "d" => Ok(Self::D),
            "T" | "t" => Ok(Self::T),
            "peaks" => Ok(Self::Peaks),
            "peaks_pair" | "peaks-pair" => Ok(Self::PeaksPair),
            other => Err(Error::Parse(format!("unknown statistic {other:?}"))),
        }
    }
}

/// How uniform permutations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    /// Rank construction from `n` i.i.d. uniform points.
    #[default]
    Points,
    /// Fisher-Yates shuffle.
    Shuffle,
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "points" => Ok(Self::Points),
            "shuffle" => Ok(Self::Shuffle),
            other => Err(Error::Parse(format!("unknown sampler {other:?}"))),
        }
    }
}

impl Sampler {
    /// A uniform `(π, π⁻¹)`.
    pub fn draw(self, n: usize, rng: &mut SeededRng) -> Result<(Permutation, Permutation)> {
        match self {
            Self::Points => sample_from_points(n, rng),
            Self::Shuffle => {
                let p = Permutation::sample_uniform(n, rng)?;
                let inv = p.inverse();
                Ok((p, inv))
            }
        }
    }
}

pub(crate) const BLOCK: usize = 1000;

/// Runs `count` tasks in blocks of [`BLOCK`], each block with its own
/// stream, and returns per-block results in order.
pub(crate) fn run_blocks<T, F>(count: usize, rng: &mut SeededRng, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut SeededRng) -> Result<T> + Sync,
{
    let base = rng.next_u64();
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK.min(count - b * BLOCK);
            work(len, &mut SeededRng::new(mix_seed(base, b as u64)))
        })
        .collect()
}

fn sample_values(
    stat: &Statistic,
    n: usize,
    samples: usize,
    sampler: Sampler,
    rng: &mut SeededRng,
) -> Result<Vec<f64>> {
    let blocks = run_blocks(samples, rng, |len, r| {
        (0..len)
            .map(|_| {
                let (p, inv) = sampler.draw(n, r)?;
                Ok(stat.eval_pair(&p, &inv))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(blocks.concat())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McOptions {
    pub sampler: Sampler,
    /// Keep the raw (unstandardized) values in [`McReport::values`].
    pub keep_values: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub statistic: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub sampler: Sampler,
    /// Sample mean and sd of the raw values.
    pub mean: f64,
    pub sd: f64,
    /// `"exact"` or `"sample"`: which moments standardize the values.
    pub standardization: &'static str,
    pub center: f64,
    pub scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_mean: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_variance: Option<String>,
    pub ks: f64,
    pub w1: f64,
    #[serde(skip)]
    pub values: Vec<f64>,
}

pub fn mc_statistic(stat: &Statistic, n: usize, samples: usize, rng: &mut SeededRng) -> Result<McReport> {
    mc_statistic_with(stat, n, samples, rng, McOptions::default())
}

/// Draws `samples` uniform permutations, standardizes `stat` (exact moments
/// when known, sample moments otherwise) and measures KS and W1 distance to
/// the standard normal.
pub fn mc_statistic_with(
    stat: &Statistic,
    n: usize,
    samples: usize,
    rng: &mut SeededRng,
    opts: McOptions,
) -> Result<McReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    stat.check_size(n)?;
    let seed = rng.seed();
    let values = sample_values(stat, n, samples, opts.sampler, rng)?;
    let (mean, sd) = empirical::mean_sd(&values);
    let exact = stat.exact_moments(n)?;
    let (center, scale, standardization, exact_mean, exact_variance) = match exact {
        Some((m, v, ms, vs)) => (m, v.sqrt(), "exact", Some(ms), Some(vs)),
        None => (mean, sd, "sample", None, None),
    };
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "statistic {stat} has zero variance at n = {n}"
        )));
    }
    let mut z: Vec<f64> = values.iter().map(|x| (x - center) / scale).collect();
    z.sort_unstable_by(f64::total_cmp);
    let ks = empirical::ks_sorted(&z);
    let w1 = empirical::w1_sorted(&z);
    Ok(McReport {
        statistic: stat.name().to_string(),
        n,
        samples,
        seed,
        sampler: opts.sampler,
        mean,
        sd,
        standardization,
        center,
        scale,
        exact_mean,
        exact_variance,
        ks,
        w1,
        values: if opts.keep_values { values } else { Vec::new() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BivariateReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub corr: f64,
    /// KS distance of standardized `D(π)` and `D(π⁻¹)`.
    pub marginal_ks: (f64, f64),
    pub exact_corr: String,
    pub exact_corr_value: f64,
}

/// Samples `(D(π), D(π⁻¹))` through the rank construction.
pub fn bivariate_experiment(n: usize, samples: usize, rng: &mut SeededRng) -> Result<BivariateReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if n < 2 {
        return Err(Error::InvalidSize("bivariate experiment requires n >= 2".into()));
    }
    let seed = rng.seed();
    let blocks = run_blocks(samples, rng, |len, r| {
        (0..len)
            .map(|_| {
                let (p, inv) = Sampler::Points.draw(n, r)?;
                Ok((descents_of(p.as_zero_based()) as i64, descents_of(inv.as_zero_based()) as i64))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let (xs, ys): (Vec<i64>, Vec<i64>) = blocks.concat().into_iter().unzip();
    let corr = empirical::pearson_integer(&xs, &ys).unwrap_or(f64::NAN);
    let n_i = n as i64;
    let m = formulas::descent_mean(n_i).to_f64().unwrap_or(f64::NAN);
    let s = formulas::descent_variance(n_i).to_f64().unwrap_or(f64::NAN).sqrt();
    let ks = |v: &[i64]| {
        let mut z: Vec<f64> = v.iter().map(|&x| (x as f64 - m) / s).collect();
        empirical::ks_to_normal(&mut z)
    };
    let exact = formulas::descent_correlation(n_i);
    Ok(BivariateReport {
        n,
        samples,
        seed,
        corr,
        marginal_ks: (ks(&xs), ks(&ys)),
        exact_corr: format_rational(&exact),
        exact_corr_value: exact.to_f64().unwrap_or(f64::NAN),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Empirical `P(D(π) = D(π⁻¹))`.
    pub rate: f64,
    /// `rate · √n`.
    pub sqrt_n_scaled: f64,
}

pub fn coincidence_rate(n: usize, samples: usize, rng: &mut SeededRng) -> Result<CoincidenceReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least 1 sample".into()));
    }
    let seed = rng.seed();
    let hits: usize = run_blocks(samples, rng, |len, r| {
        let mut hits = 0;
        for _ in 0..len {
            let (p, inv) = Sampler::Points.draw(n, r)?;
            hits += usize::from(descents_of(p.as_zero_based()) == descents_of(inv.as_zero_based()));
        }
        Ok(hits)
    })?
    .into_iter()
    .sum();
    let rate = hits as f64 / samples as f64;
    Ok(CoincidenceReport {
        n,
        samples,
        seed,
        rate,
        sqrt_n_scaled: rate * (n as f64).sqrt(),
    })
}
