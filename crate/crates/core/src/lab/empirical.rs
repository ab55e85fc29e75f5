//! Distances from an empirical sample to the standard normal.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::normal;

/// `sup_x |F_N(x) - Φ(x)|`, checking both one-sided limits at every atom so
/// tied samples are handled. Sorts `values` in place.
pub fn ks_to_normal(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    ks_sorted(values)
}

pub fn ks_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let phi = normal::cdf(v);
        worst = worst
            .max((i as f64 / n - phi).abs())
            .max((j as f64 / n - phi).abs());
        i = j;
    }
    worst
}

/// Quantile-coupling estimate `(1/N) Σ |x_(i) - Φ⁻¹((i - 1/2)/N)|`.
/// Sorts `values` in place.
pub fn w1_to_normal(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    w1_sorted(values)
}

pub fn w1_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - normal::quantile((i as f64 + 0.5) / n)).abs())
        .sum::<f64>()
        / n
}

/// Pearson correlation of integer samples, computed from exact integer
/// sums so that perfectly linear data gives exactly `±1`. `None` when
/// either side is constant.
pub fn pearson_integer(xs: &[i64], ys: &[i64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = BigInt::from(xs.len());
    let sum = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).sum::<BigInt>();
    let (sx, sy) = (sum(xs), sum(ys));
    let sxx: BigInt = xs.iter().map(|&x| BigInt::from(x) * x).sum();
    let syy: BigInt = ys.iter().map(|&y| BigInt::from(y) * y).sum();
    let sxy: BigInt = xs.iter().zip(ys).map(|(&x, &y)| BigInt::from(x) * y).sum();
    let cov = &n * sxy - &sx * &sy;
    let vx = &n * sxx - &sx * &sx;
    let vy = &n * syy - &sy * &sy;
    if vx.is_zero() || vy.is_zero() {
        return None;
    }
    if &cov * &cov == &vx * &vy {
        return Some(if cov.is_negative() { -1.0 } else { 1.0 });
    }
    let c = cov.to_f64()?;
    Some(c / (vx.to_f64()?.sqrt() * vy.to_f64()?.sqrt()))
}

/// Plain sample mean and standard deviation (`N - 1` denominator).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}
