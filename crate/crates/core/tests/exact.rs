use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use permclt_core::exact::{
    bivariate_brute, bivariate_gf, bivariate_recurrence, carlitz_mismatches, eulerian_row,
    irwin_hall_cell, moments, t_distribution, CarlitzRule, ExactDistribution,
};

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Mean and variance straight from the counts.
fn raw_moments(d: &ExactDistribution) -> (BigRational, BigRational) {
    let total = BigRational::from_integer(BigInt::from(d.total()));
    let (mut s1, mut s2) = (BigRational::zero(), BigRational::zero());
    for (v, c) in &d.values {
        let c = BigRational::from_integer(BigInt::from(c.clone()));
        let v = BigRational::from_integer(BigInt::from(*v));
        s1 += &c * &v;
        s2 += &c * &v * &v;
    }
    let mean = s1 / &total;
    let var = s2 / &total - &mean * &mean;
    (mean, var)
}

fn t_variance(n: i64) -> BigRational {
    q(n + 7, 6) - q(1, n)
}

#[test]
fn t_law_moments_through_forty() {
    for n in 2..=40usize {
        let dist = t_distribution(&bivariate_recurrence(n).unwrap());
        let (mean, var) = raw_moments(&dist);
        assert_eq!(mean, q(n as i64 - 1, 1), "n = {n}");
        assert_eq!(var, t_variance(n as i64), "n = {n}");
        let m = moments(&dist).unwrap();
        assert_eq!((m.mean, m.variance), (mean, var));
    }
    for n in 2..=9usize {
        let dist = t_distribution(&bivariate_brute(n).unwrap());
        assert_eq!(raw_moments(&dist), (q(n as i64 - 1, 1), t_variance(n as i64)));
    }
}

#[test]
fn variance_splits_into_marginals_and_covariance() {
    for n in 2..=60i64 {
        let lhs = q(2 * (n + 1), 12) + q(2 * (n - 1), 2 * n);
        assert_eq!(lhs, t_variance(n), "n = {n}");
    }
}

#[test]
fn t_law_is_symmetric_about_its_mean() {
    for n in 2..=25usize {
        let d = t_distribution(&bivariate_gf(n).unwrap());
        let top = 2 * (n as i64 - 1);
        for (v, c) in &d.values {
            assert_eq!(&d.count(top - v), c, "n = {n}, value {v}");
        }
    }
}

#[test]
fn eulerian_rows_are_palindromes_summing_to_factorial() {
    let mut fact = BigUint::one();
    for n in 1..=120usize {
        fact *= n;
        let row = eulerian_row(n).unwrap();
        assert_eq!(row.total(), fact);
        let dense = row.dense_counts();
        let rev: Vec<_> = dense.iter().rev().cloned().collect();
        assert_eq!(dense, rev, "n = {n}");
    }
}

#[test]
fn irwin_hall_cells_sum_to_one() {
    for n in 1..=25usize {
        let total: BigRational = (0..n).map(|j| irwin_hall_cell(n, j).unwrap()).sum();
        assert_eq!(total, BigRational::one(), "n = {n}");
    }
}

#[test]
fn strict_vanishing_rule_matches_every_table() {
    for n in 2..=40usize {
        let t = bivariate_recurrence(n).unwrap();
        assert!(carlitz_mismatches(&t, CarlitzRule::Strict).is_empty(), "n = {n}");
    }
}

#[test]
fn single_joint_cell_oracle() {
    // Counted by hand over S_4: only 3 1 4 2 has one descent and an inverse with two.
    let t = bivariate_brute(4).unwrap();
    assert_eq!(t.get(2, 3), BigUint::one());
    assert_eq!(t.get(3, 2), BigUint::one());
}
