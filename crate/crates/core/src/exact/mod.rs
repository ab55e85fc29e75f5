//! Exact laws and moments over all of `S_n`.
//!
//! Counts are arbitrary-precision integers and moments are exact rationals.
//! Floating point appears only when a law is compared with the normal
//! distribution.

mod bivariate;
mod eulerian;

pub use bivariate::{
    bivariate_brute, bivariate_gf, bivariate_recurrence, carlitz_mismatches,
    carlitz_predicts_zero, carlitz_support_check, t_distribution, BivariateDescentTable,
    CarlitzRule, TableMethod, DEFAULT_GF_CAP,
};
pub use eulerian::{eulerian_row, eulerian_row_with_cap, irwin_hall_cell, verify_euler_identity, DEFAULT_EULERIAN_CAP};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::normal;
use crate::perm::{enumerate, DEFAULT_ENUMERATION_CAP};
use crate::stats::descents;

/// Law of an integer statistic on uniform `S_n`: `(value, count)` pairs in
/// increasing value order, counts summing to `n!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactDistribution {
    pub n: usize,
    #[serde(serialize_with = "serialize_counts")]
    pub values: Vec<(i64, BigUint)>,
}

fn serialize_counts<S: Serializer>(
    values: &[(i64, BigUint)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Cell {
        value: i64,
        count: String,
    }
    s.collect_seq(values.iter().map(|(v, c)| Cell {
        value: *v,
        count: c.to_string(),
    }))
}

impl ExactDistribution {
    /// Sorts by value and merges repeated values.
    pub fn from_counts(n: usize, counts: impl IntoIterator<Item = (i64, BigUint)>) -> Self {
        let mut values: Vec<(i64, BigUint)> = counts.into_iter().collect();
        values.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(i64, BigUint)> = Vec::with_capacity(values.len());
        for (v, c) in values {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        Self { n, values: merged }
    }

    /// A single atom of mass 1 at `value`.
    pub fn point_mass(value: i64) -> Self {
        Self {
            n: 1,
            values: vec![(value, BigUint::from(1u8))],
        }
    }

    pub fn total(&self) -> BigUint {
        self.values.iter().map(|(_, c)| c).sum()
    }

    pub fn count(&self, value: i64) -> BigUint {
        self.values
            .iter()
            .find(|(v, _)| *v == value)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    /// Counts as a dense vector over `min..=max` (zeros included).
    pub fn dense_counts(&self) -> Vec<BigUint> {
        let (Some(first), Some(last)) = (self.values.first(), self.values.last()) else {
            return Vec::new();
        };
        let mut out = vec![BigUint::zero(); (last.0 - first.0 + 1) as usize];
        for (v, c) in &self.values {
            out[(v - first.0) as usize] = c.clone();
        }
        out
    }
}

/// Exact mean and variance, plus a covariance where one applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMoments {
    pub mean: BigRational,
    pub variance: BigRational,
    pub covariance: Option<BigRational>,
}

impl ExactMoments {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64().unwrap_or(f64::NAN)
    }

    pub fn sd_f64(&self) -> f64 {
        self.variance.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

/// Renders a rational as `"p/q"`, or `"p"` when integral.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn big(c: &BigUint) -> BigInt {
    BigInt::from(c.clone())
}

/// Mean and variance of the uniform law given by `dist`.
pub fn moments(dist: &ExactDistribution) -> Result<ExactMoments> {
    let total = dist.total();
    if total.is_zero() {
        return Err(Error::InvalidArgument("empty distribution".into()));
    }
    let total = BigRational::from_integer(big(&total));
    let mut first = BigInt::zero();
    let mut second = BigInt::zero();
    for (v, c) in &dist.values {
        let v = BigInt::from(*v);
        let c = big(c);
        second += &v * &v * &c;
        first += v * c;
    }
    let mean = BigRational::from_integer(first) / &total;
    let variance = BigRational::from_integer(second) / &total - &mean * &mean;
    Ok(ExactMoments {
        mean,
        variance,
        covariance: None,
    })
}

/// `sup_x |P((X - mean)/sd <= x) - Φ(x)|`.
///
/// The supremum of a step function minus a continuous increasing one is
/// attained at a jump, approached from the left or the right, so only the
/// atoms need checking.
pub fn kolmogorov_to_normal(dist: &ExactDistribution, mean: &BigRational, sd: f64) -> Result<f64> {
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(Error::InvalidArgument(format!("sd must be positive, got {sd}")));
    }
    let total = dist.total();
    if total.is_zero() {
        return Err(Error::InvalidArgument("empty distribution".into()));
    }
    let total_q = BigRational::from_integer(big(&total));
    let mut cumulative = BigUint::zero();
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    for (v, c) in &dist.values {
        cumulative += c;
        let at = (BigRational::from_integer(big(&cumulative)) / &total_q)
            .to_f64()
            .unwrap_or(f64::NAN);
        let z = (BigRational::from_integer(BigInt::from(*v)) - mean)
            .to_f64()
            .unwrap_or(f64::NAN)
            / sd;
        let phi = normal::cdf(z);
        sup = sup.max((at - phi).abs()).max((below - phi).abs());
        below = at;
    }
    Ok(sup)
}

/// `E(D(π) D(π⁻¹))` and `Cov(D(π), D(π⁻¹))` by enumeration of `S_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentCovariance {
    pub n: usize,
    pub mean_product: BigRational,
    pub covariance: BigRational,
    /// `Var(D(π))`, which equals `Var(D(π⁻¹))`.
    pub variance: BigRational,
}

impl DescentCovariance {
    pub fn correlation(&self) -> Option<BigRational> {
        (!self.variance.is_zero()).then(|| &self.covariance / &self.variance)
    }
}

pub fn descent_covariance_exact(n: usize) -> Result<DescentCovariance> {
    let mut sum_d = 0u64;
    let mut sum_dinv = 0u64;
    let mut sum_d2 = 0u64;
    let mut sum_prod = 0u64;
    let mut count = 0u64;
    for p in enumerate(n)? {
        let d = descents(&p) as u64;
        let di = descents(&p.inverse()) as u64;
        sum_d += d;
        sum_dinv += di;
        sum_d2 += d * d;
        sum_prod += d * di;
        count += 1;
    }
    let q = |x: u64| BigRational::new(BigInt::from(x), BigInt::from(count));
    let (ed, edi) = (q(sum_d), q(sum_dinv));
    let mean_product = q(sum_prod);
    Ok(DescentCovariance {
        n,
        covariance: &mean_product - &ed * &edi,
        variance: q(sum_d2) - &ed * &ed,
        mean_product,
    })
}

/// Closed forms for uniform `π ∈ S_n`, `n >= 2`.
pub mod formulas {
    use super::rational;
    use num_rational::BigRational;

    /// `E D = (n-1)/2`.
    pub fn descent_mean(n: i64) -> BigRational {
        rational(n - 1, 2)
    }

    /// `Var D = (n+1)/12`.
    pub fn descent_variance(n: i64) -> BigRational {
        rational(n + 1, 12)
    }

    /// `Cov(D(π), D(π⁻¹)) = (n-1)/(2n)`.
    pub fn descent_covariance(n: i64) -> BigRational {
        rational(n - 1, 2 * n)
    }

    /// `E(D(π) D(π⁻¹)) = (n-1)²/4 + (n-1)/(2n)`.
    pub fn descent_mean_product(n: i64) -> BigRational {
        rational((n - 1) * (n - 1), 4) + rational(n - 1, 2 * n)
    }

    /// `E T = n - 1`.
    pub fn t_mean(n: i64) -> BigRational {
        rational(n - 1, 1)
    }

    /// `Var T = (n+7)/6 - 1/n`.
    pub fn t_variance(n: i64) -> BigRational {
        rational(n + 7, 6) - rational(1, n)
    }

    /// `Corr(D(π), D(π⁻¹)) = 6(n-1) / (n(n+1))`.
    pub fn descent_correlation(n: i64) -> BigRational {
        descent_covariance(n) / descent_variance(n)
    }
}

/// Upper bound on the enumeration used by [`descent_covariance_exact`].
pub const COVARIANCE_CAP: usize = DEFAULT_ENUMERATION_CAP;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_examples() {
        assert_eq!(descent_covariance_exact(2).unwrap().covariance, rational(1, 4));
        assert_eq!(descent_covariance_exact(3).unwrap().covariance, rational(1, 3));
        assert_eq!(descent_covariance_exact(8).unwrap().covariance, rational(7, 16));
        assert!(matches!(
            descent_covariance_exact(11),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(
            descent_covariance_exact(3).unwrap().correlation().unwrap(),
            rational(1, 1)
        );
        assert_eq!(
            descent_covariance_exact(4).unwrap().correlation().unwrap(),
            rational(9, 10)
        );
        assert_eq!(formulas::descent_correlation(4), rational(9, 10));
        assert_eq!(descent_covariance_exact(1).unwrap().correlation(), None);
    }

    #[test]
    fn covariance_formula_through_n9() {
        for n in 2..=9 {
            let c = descent_covariance_exact(n).unwrap();
            let n = n as i64;
            assert_eq!(c.covariance, formulas::descent_covariance(n));
            assert_eq!(c.mean_product, formulas::descent_mean_product(n));
            assert_eq!(c.variance, formulas::descent_variance(n));
        }
    }

    #[test]
    fn variance_decomposition() {
        for n in 2..=200 {
            let lhs = rational(2, 1) * formulas::descent_variance(n)
                + rational(2, 1) * formulas::descent_covariance(n);
            assert_eq!(lhs, formulas::t_variance(n));
        }
        assert_eq!(formulas::t_variance(9), rational(23, 9));
    }

    #[test]
    fn moments_of_small_laws() {
        let t2 = ExactDistribution::from_counts(2, [(0, 1u8.into()), (2, 1u8.into())]);
        let m = moments(&t2).unwrap();
        assert_eq!(m.mean, rational(1, 1));
        assert_eq!(m.variance, rational(1, 1));
        let d4 = eulerian_row(4).unwrap();
        let m = moments(&d4).unwrap();
        assert_eq!(m.mean, rational(3, 2));
        assert_eq!(m.variance, rational(5, 12));
        assert!(moments(&ExactDistribution::from_counts(1, [])).is_err());
    }

    #[test]
    fn from_counts_merges() {
        let d = ExactDistribution::from_counts(
            3,
            [(2, 1u8.into()), (0, 2u8.into()), (2, 3u8.into())],
        );
        assert_eq!(d.values, vec![(0, 2u8.into()), (2, 4u8.into())]);
        assert_eq!(d.dense_counts(), vec![2u8.into(), 0u8.into(), 4u8.into()]);
    }

    #[test]
    fn kolmogorov_point_mass() {
        let d = ExactDistribution::point_mass(0);
        let k = kolmogorov_to_normal(&d, &rational(0, 1), 1.0).unwrap();
        assert!((k - 0.5).abs() < 1e-15);
        assert!(kolmogorov_to_normal(&d, &rational(0, 1), 0.0).is_err());
    }

    #[test]
    fn kolmogorov_two_point_law() {
        // T on S_2: standardized values -1 and +1 with mass 1/2 each.
        let t2 = ExactDistribution::from_counts(2, [(0, 1u8.into()), (2, 1u8.into())]);
        let k = kolmogorov_to_normal(&t2, &rational(1, 1), 1.0).unwrap();
        assert!((k - (0.5 - normal::cdf(-1.0))).abs() < 1e-12);
    }

    #[test]
    fn pitman_bound_small_n() {
        for n in [10usize, 20, 100] {
            let row = eulerian_row(n).unwrap();
            let sd = (((n + 1) as f64) / 12.0).sqrt();
            let k = kolmogorov_to_normal(&row, &formulas::descent_mean(n as i64), sd).unwrap();
            assert!(k < (12.0 / n as f64).sqrt(), "n={n} k={k}");
        }
    }

    #[test]
    fn format_rationals() {
        assert_eq!(format_rational(&rational(47, 18)), "47/18");
        assert_eq!(format_rational(&rational(16, 2)), "8");
        assert_eq!(format_rational(&rational(-1, 3)), "-1/3");
    }
}
