//! Local statistics of degree `k`: `F(π) = Σ_w f_w(pattern of window w)`,
//! one window per `k` consecutive positions.
//!
//! Windows are numbered from 0, so window `w` covers positions
//! `w+1, ..., w+k` and there are `n-k+1` of them. A component is a table
//! indexed by the `k!` patterns; patterns absent from a JSON table are 0.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactMoments;
use crate::perm::{enumerate_with_cap, Permutation};

/// Largest supported window.
pub const MAX_DEGREE: usize = 8;

/// Largest degree for which exact moments are computed (joint windows of
/// length up to `2k - 1` are enumerated).
pub const MAX_EXACT_MOMENT_DEGREE: usize = 5;

/// Component values indexed by the lexicographic rank of the pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    degree: usize,
    values: Vec<f64>,
}

impl PatternTable {
    pub fn zeros(degree: usize) -> Result<Self> {
        check_degree(degree)?;
        Ok(Self {
            degree,
            values: vec![0.0; factorial(degree)],
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn set(&mut self, pattern: &Permutation, value: f64) -> Result<()> {
        if pattern.len() != self.degree {
            return Err(Error::LocalStatistic(format!(
                "pattern {pattern} has length {} but degree is {}",
                pattern.len(),
                self.degree
            )));
        }
        if !value.is_finite() || value.abs() > 1.0 {
            return Err(Error::LocalStatistic(format!(
                "component value {value} for pattern {pattern} is outside [-1, 1]"
            )));
        }
        self.values[pattern.lex_rank() as usize] = value;
        Ok(())
    }

    pub fn value(&self, pattern: &Permutation) -> f64 {
        self.values[pattern.lex_rank() as usize]
    }

    fn value_at_rank(&self, rank: usize) -> f64 {
        self.values[rank]
    }

    fn is_integer_valued(&self) -> bool {
        self.values.iter().all(|v| v.fract() == 0.0)
    }

    fn from_map(degree: usize, map: &BTreeMap<String, f64>) -> Result<Self> {
        let mut table = Self::zeros(degree)?;
        for (key, &value) in map {
            let pattern: Permutation = key.parse()?;
            table.set(&pattern, value)?;
        }
        Ok(table)
    }

    fn to_map(&self) -> BTreeMap<String, f64> {
        enumerate_with_cap(self.degree, MAX_DEGREE)
            .expect("degree already validated")
            .zip(&self.values)
            .filter(|(_, &v)| v != 0.0)
            .map(|(p, &v)| (p.to_string(), v))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Components {
    Uniform(PatternTable),
    PerWindow(Vec<PatternTable>),
}

/// A degree-`k` local statistic with components bounded by 1 in absolute value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LocalStatisticFile", into = "LocalStatisticFile")]
pub struct LocalStatistic {
    degree: usize,
    components: Components,
}

/// On-disk form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalStatisticFile {
    degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uniform_component: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    components: Option<Vec<BTreeMap<String, f64>>>,
}

impl TryFrom<LocalStatisticFile> for LocalStatistic {
    type Error = Error;

    fn try_from(file: LocalStatisticFile) -> Result<Self> {
        match (file.uniform_component, file.components) {
            (Some(map), None) => Self::uniform(PatternTable::from_map(file.degree, &map)?),
            (None, Some(maps)) => Self::per_window(
                maps.iter()
                    .map(|m| PatternTable::from_map(file.degree, m))
                    .collect::<Result<_>>()?,
            ),
            _ => Err(Error::LocalStatistic(
                "exactly one of `uniform_component` and `components` must be given".into(),
            )),
        }
    }
}

impl From<LocalStatistic> for LocalStatisticFile {
    fn from(stat: LocalStatistic) -> Self {
        match stat.components {
            Components::Uniform(t) => Self {
                degree: stat.degree,
                uniform_component: Some(t.to_map()),
                components: None,
            },
            Components::PerWindow(ts) => Self {
                degree: stat.degree,
                uniform_component: None,
                components: Some(ts.iter().map(PatternTable::to_map).collect()),
            },
        }
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if !(2..=MAX_DEGREE).contains(&degree) {
        return Err(Error::LocalStatistic(format!(
            "degree {degree} outside 2..={MAX_DEGREE}"
        )));
    }
    Ok(())
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Lexicographic rank of the relative order of `w` (distinct values).
fn window_rank(w: &[usize]) -> usize {
    let k = w.len();
    let mut rank = 0;
    for a in 0..k {
        let smaller_later = w[a + 1..].iter().filter(|&&x| x < w[a]).count();
        rank = rank * (k - a) + smaller_later;
    }
    rank
}

impl LocalStatistic {
    /// Same component table in every window.
    pub fn uniform(table: PatternTable) -> Result<Self> {
        Ok(Self {
            degree: table.degree,
            components: Components::Uniform(table),
        })
    }

    /// One table per window; only applies to permutations of size
    /// `tables.len() + degree - 1`.
    pub fn per_window(tables: Vec<PatternTable>) -> Result<Self> {
        let degree = tables
            .first()
            .ok_or_else(|| Error::LocalStatistic("no component tables".into()))?
            .degree;
        if tables.iter().any(|t| t.degree != degree) {
            return Err(Error::LocalStatistic("component tables differ in degree".into()));
        }
        Ok(Self {
            degree,
            components: Components::PerWindow(tables),
        })
    }

    /// Descents as a degree-2 statistic: `f(21) = 1`.
    pub fn descents() -> Self {
        let mut t = PatternTable::zeros(2).expect("degree 2");
        t.set(&Permutation::reversal(2).expect("n = 2"), 1.0)
            .expect("value 1");
        Self::uniform(t).expect("uniform")
    }

    /// Interior peaks as a degree-3 statistic: `f(132) = f(231) = 1`.
    pub fn peaks() -> Self {
        let mut t = PatternTable::zeros(3).expect("degree 3");
        for s in ["1 3 2", "2 3 1"] {
            t.set(&s.parse().expect("pattern"), 1.0).expect("value 1");
        }
        Self::uniform(t).expect("uniform")
    }

    pub fn zero(degree: usize) -> Result<Self> {
        Self::uniform(PatternTable::zeros(degree)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Whether all component values are integers; sums are then exact.
    pub fn is_integer_valued(&self) -> bool {
        match &self.components {
            Components::Uniform(t) => t.is_integer_valued(),
            Components::PerWindow(ts) => ts.iter().all(PatternTable::is_integer_valued),
        }
    }

    fn table(&self, window: usize) -> &PatternTable {
        match &self.components {
            Components::Uniform(t) => t,
            Components::PerWindow(ts) => &ts[window],
        }
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if self.degree > n {
            return Err(Error::SizeMismatch {
                left: self.degree,
                right: n,
            });
        }
        if let Components::PerWindow(ts) = &self.components {
            if ts.len() != n - self.degree + 1 {
                return Err(Error::LocalStatistic(format!(
                    "{} component tables given, n = {n} and degree {} need {}",
                    ts.len(),
                    self.degree,
                    n - self.degree + 1
                )));
            }
        }
        Ok(())
    }

    /// `F(π)`.
    pub fn eval(&self, p: &Permutation) -> Result<f64> {
        self.check_size(p.len())?;
        Ok(self.eval_values(p.as_zero_based()))
    }

    /// Caller has already checked the size.
    pub(crate) fn eval_values(&self, values: &[usize]) -> f64 {
        let windows = values.windows(self.degree).enumerate();
        if self.is_integer_valued() {
            windows
                .map(|(w, win)| self.table(w).value_at_rank(window_rank(win)) as i64)
                .sum::<i64>() as f64
        } else {
            windows
                .map(|(w, win)| self.table(w).value_at_rank(window_rank(win)))
                .sum()
        }
    }

    /// Exact mean and variance of `F(π)` for uniform `π ∈ S_n`.
    ///
    /// Windows at distance `>= k` see disjoint positions and are independent;
    /// for closer pairs the joint law is read off all `(k+d)!` orders of the
    /// union window.
    pub fn exact_moments(&self, n: usize) -> Result<ExactMoments> {
        self.check_size(n)?;
        let k = self.degree;
        if k > MAX_EXACT_MOMENT_DEGREE {
            return Err(Error::CapExceeded {
                what: "exact local-statistic moments (degree)",
                n: k,
                cap: MAX_EXACT_MOMENT_DEGREE,
            });
        }
        let windows = n - k + 1;
        let patterns = factorial(k);
        let rat = |v: f64| BigRational::from_float(v).expect("finite component");
        let tables: Vec<Vec<BigRational>> = (0..windows)
            .map(|w| self.table(w).values.iter().map(|&v| rat(v)).collect())
            .collect();
        let k_fact = BigRational::from_integer(BigInt::from(patterns));
        let means: Vec<BigRational> = tables
            .iter()
            .map(|t| t.iter().fold(BigRational::zero(), |a, b| a + b) / &k_fact)
            .collect();
        let mean = means.iter().fold(BigRational::zero(), |a, b| a + b);

        let mut variance = BigRational::zero();
        for d in 0..k.min(windows) {
            let len = k + d;
            // joint[a][b]: number of orders of the union window whose first
            // k entries have pattern a and last k entries pattern b.
            let mut joint = vec![vec![0u64; patterns]; patterns];
            for q in enumerate_with_cap(len, 2 * MAX_EXACT_MOMENT_DEGREE)? {
                let v = q.as_zero_based();
                joint[window_rank(&v[..k])][window_rank(&v[d..])] += 1;
            }
            let total = BigRational::from_integer(BigInt::from(factorial(len)));
            let weight = if d == 0 {
                BigRational::one()
            } else {
                BigRational::from_integer(BigInt::from(2))
            };
            for i in 0..windows - d {
                let (ti, tj) = (&tables[i], &tables[i + d]);
                let mut e_prod = BigRational::zero();
                for (a, row) in joint.iter().enumerate() {
                    for (b, &c) in row.iter().enumerate() {
                        if c != 0 && !ti[a].is_zero() && !tj[b].is_zero() {
                            e_prod += &ti[a] * &tj[b] * BigRational::from_integer(BigInt::from(c));
                        }
                    }
                }
                let cov = e_prod / &total - &means[i] * &means[i + d];
                variance += &weight * cov;
            }
        }
        Ok(ExactMoments {
            mean,
            variance,
            covariance: None,
        })
    }
}

/// `W = F(π) + G(π⁻¹)`; either side may be absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalPair {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward: Option<LocalStatistic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<LocalStatistic>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LocalFile {
    Pair(LocalPair),
    Single(LocalStatistic),
}

impl LocalPair {
    pub fn new(forward: Option<LocalStatistic>, inverse: Option<LocalStatistic>) -> Self {
        Self { forward, inverse }
    }

    /// Same statistic on both sides: `F(π) + F(π⁻¹)`.
    pub fn symmetric(stat: LocalStatistic) -> Self {
        Self {
            forward: Some(stat.clone()),
            inverse: Some(stat),
        }
    }

    /// Accepts either a pair object or a single statistic (forward side only).
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<LocalFile>(text) {
            Ok(LocalFile::Pair(pair)) if pair.forward.is_some() || pair.inverse.is_some() => {
                Ok(pair)
            }
            Ok(LocalFile::Single(stat)) => Ok(Self::new(Some(stat), None)),
            // Fall back to the single-statistic parser for its error message.
            _ => Ok(Self::new(Some(LocalStatistic::from_json(text)?), None)),
        }
    }

    /// Largest degree of the two sides.
    pub fn degree(&self) -> usize {
        self.sides().map(|s| s.degree).max().unwrap_or(0)
    }

    pub fn is_integer_valued(&self) -> bool {
        self.sides().all(LocalStatistic::is_integer_valued)
    }

    fn sides(&self) -> impl Iterator<Item = &LocalStatistic> {
        self.forward.iter().chain(self.inverse.iter())
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        self.sides().try_for_each(|s| s.check_size(n))
    }

    /// `F(π) + G(σ)` where `σ` is supplied as `π⁻¹`.
    pub fn eval_with_inverse(&self, p: &Permutation, p_inv: &Permutation) -> Result<f64> {
        self.check_size(p.len())?;
        Ok(self.eval_unchecked(p, p_inv))
    }

    pub(crate) fn eval_unchecked(&self, p: &Permutation, p_inv: &Permutation) -> f64 {
        let f = self
            .forward
            .as_ref()
            .map_or(0.0, |s| s.eval_values(p.as_zero_based()));
        let g = self
            .inverse
            .as_ref()
            .map_or(0.0, |s| s.eval_values(p_inv.as_zero_based()));
        f + g
    }

    pub fn eval(&self, p: &Permutation) -> Result<f64> {
        self.eval_with_inverse(p, &p.inverse())
    }
}
