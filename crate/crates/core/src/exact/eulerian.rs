use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::ExactDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_EULERIAN_CAP: usize = 500;

/// Eulerian numbers `A(n, d)`: permutations of `S_n` with `d` descents.
///
/// Triangle recurrence `A(n, d) = (d+1) A(n-1, d) + (n-d) A(n-1, d-1)`.
pub fn eulerian_row(n: usize) -> Result<ExactDistribution> {
    eulerian_row_with_cap(n, DEFAULT_EULERIAN_CAP)
}

pub fn eulerian_row_with_cap(n: usize, cap: usize) -> Result<ExactDistribution> {
    if n == 0 {
        return Err(Error::InvalidSize("Eulerian row requires n >= 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "Eulerian row",
            n,
            cap,
        });
    }
    Ok(ExactDistribution::from_counts(
        n,
        eulerian_counts(n).into_iter().enumerate().map(|(d, c)| (d as i64, c)),
    ))
}

/// `[A(n, 0), ..., A(n, n-1)]`.
pub(crate) fn eulerian_counts(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for m in 2..=n {
        let mut next = vec![BigUint::zero(); m];
        for (d, slot) in next.iter_mut().enumerate() {
            if d < row.len() {
                *slot += &row[d] * (d as u64 + 1);
            }
            if d >= 1 {
                *slot += &row[d - 1] * (m - d) as u64;
            }
        }
        row = next;
    }
    row
}

/// Checks `Σ_k k^n t^k = A_n(t) / (1-t)^{n+1}` on the coefficients of
/// `t^0, ..., t^K`, where `A_n(t) = Σ_i A(n, i-1) t^i`.
pub fn verify_euler_identity(n: usize, k_max: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidSize("Euler identity requires n >= 1".into()));
    }
    if k_max < n + 2 {
        return Err(Error::InvalidArgument(format!(
            "need K >= n + 2 = {}, got {k_max}",
            n + 2
        )));
    }
    let counts = eulerian_counts(n);
    // Coefficient of t^m in (1-t)^{-(n+1)} is C(m+n, n).
    let series: Vec<BigUint> = (0..=k_max)
        .map(|m| binomial(BigUint::from(m + n), BigUint::from(n)))
        .collect();
    for k in 0..=k_max {
        let lhs: BigUint = (1..=n.min(k))
            .map(|i| &counts[i - 1] * &series[k - i])
            .sum();
        let rhs = Pow::pow(BigUint::from(k), n as u32);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `P(j < U_1 + ... + U_n < j+1)` for i.i.d. uniforms, from the Irwin-Hall
/// CDF `F(x) = (1/n!) Σ_m (-1)^m C(n, m) (x - m)_+^n`.
pub fn irwin_hall_cell(n: usize, j: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidSize("Irwin-Hall cell requires n >= 1".into()));
    }
    if j >= n {
        return Err(Error::InvalidArgument(format!("j = {j} outside 0..{n}")));
    }
    let pos_pow = |x: i64| -> BigInt {
        if x > 0 {
            Pow::pow(BigInt::from(x), n as u32)
        } else {
            BigInt::zero()
        }
    };
    let mut acc = BigInt::zero();
    for m in 0..=n {
        let c = BigInt::from(binomial(BigUint::from(n), BigUint::from(m)));
        let term = c * (pos_pow(j as i64 + 1 - m as i64) - pos_pow(j as i64 - m as i64));
        if m % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let n_fact: BigInt = (1..=n as u64).map(BigInt::from).product();
    Ok(BigRational::new(acc, n_fact))
}
