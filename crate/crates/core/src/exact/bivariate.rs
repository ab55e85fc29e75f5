//! Joint descent counts `A(n, r, s) = |{π : D(π) = r-1, D(π⁻¹) = s-1}|`
//! computed three independent ways: enumeration, coefficient extraction from
//! the two-variable generating function, and the differential recurrence.

use std::fmt;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ExactDistribution;
use crate::error::{Error, Result};
use crate::perm::{enumerate, DEFAULT_ENUMERATION_CAP};
use crate::stats::descents_of;

pub const DEFAULT_GF_CAP: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMethod {
    Brute,
    Gf,
    Recurrence,
}

impl fmt::Display for TableMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Brute => "brute",
            Self::Gf => "gf",
            Self::Recurrence => "recurrence",
        })
    }
}

/// `n × n` table; cell `(r, s)` (both 1-based) holds `A(n, r, s)`.
#[derive(Debug, Clone)]
pub struct BivariateDescentTable {
    n: usize,
    method: TableMethod,
    cells: Vec<Vec<BigUint>>,
}

/// Tables compare by contents; the construction method is ignored.
impl PartialEq for BivariateDescentTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.cells == other.cells
    }
}

impl Eq for BivariateDescentTable {}

impl BivariateDescentTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> TableMethod {
        self.method
    }

    /// `A(n, r, s)`, zero outside `1..=n`.
    pub fn get(&self, r: usize, s: usize) -> BigUint {
        if r == 0 || s == 0 || r > self.n || s > self.n {
            return BigUint::zero();
        }
        self.cells[r - 1][s - 1].clone()
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        &self.cells
    }

    pub fn total(&self) -> BigUint {
        self.cells.iter().flatten().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|s| self.cells[r][s] == self.cells[s][r]))
    }

    /// `Σ_s A(n, r, s)` for `r = 1..=n`; this is the Eulerian row.
    pub fn row_sums(&self) -> Vec<BigUint> {
        self.cells.iter().map(|row| row.iter().sum()).collect()
    }

    /// CSV with header `r,s,count`, one line per cell.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,s,count")?;
        for (r, row) in self.cells.iter().enumerate() {
            for (s, c) in row.iter().enumerate() {
                writeln!(out, "{},{},{}", r + 1, s + 1, c)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            n: self.n,
            method: self.method,
            cells: self
                .cells
                .iter()
                .enumerate()
                .flat_map(|(r, row)| {
                    row.iter().enumerate().map(move |(s, c)| TableCell {
                        r: r + 1,
                        s: s + 1,
                        count: c.to_string(),
                    })
                })
                .collect(),
        }
    }
}

/// JSON export: the CSV rows plus `n` and the method tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableJson {
    pub n: usize,
    pub method: TableMethod,
    pub cells: Vec<TableCell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableCell {
    pub r: usize,
    pub s: usize,
    /// Decimal big integer.
    pub count: String,
}

fn check_n(n: usize, what: &'static str, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize(format!("{what} requires n >= 1")));
    }
    if n > cap {
        return Err(Error::CapExceeded { what, n, cap });
    }
    Ok(())
}

/// Enumerates `S_n`.
pub fn bivariate_brute(n: usize) -> Result<BivariateDescentTable> {
    check_n(n, "bivariate table (brute force)", DEFAULT_ENUMERATION_CAP)?;
    let mut counts = vec![vec![0u64; n]; n];
    let mut inv = vec![0usize; n];
    for p in enumerate(n)? {
        let v = p.as_zero_based();
        for (i, &x) in v.iter().enumerate() {
            inv[x] = i;
        }
        counts[descents_of(v)][descents_of(&inv)] += 1;
    }
    Ok(BivariateDescentTable {
        n,
        method: TableMethod::Brute,
        cells: counts
            .into_iter()
            .map(|row| row.into_iter().map(BigUint::from).collect())
            .collect(),
    })
}

/// Dense polynomial in `u, v`; `c[i][j]` is the coefficient of `u^i v^j`.
#[derive(Debug, Clone, PartialEq)]
struct Poly2 {
    c: Vec<Vec<BigInt>>,
}

impl Poly2 {
    fn zero(deg_u: usize, deg_v: usize) -> Self {
        Self {
            c: vec![vec![BigInt::zero(); deg_v + 1]; deg_u + 1],
        }
    }

    fn from_terms(terms: &[(i64, usize, usize)]) -> Self {
        let du = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let dv = terms.iter().map(|t| t.2).max().unwrap_or(0);
        let mut p = Self::zero(du, dv);
        for &(a, i, j) in terms {
            p.c[i][j] += a;
        }
        p
    }

    fn deg_u(&self) -> usize {
        self.c.len() - 1
    }

    fn deg_v(&self) -> usize {
        self.c[0].len() - 1
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.deg_u() + other.deg_u(), self.deg_v() + other.deg_v());
        for (i, row) in self.c.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, orow) in other.c.iter().enumerate() {
                    for (l, b) in orow.iter().enumerate() {
                        if !b.is_zero() {
                            out.c[i + k][j + l] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    fn add_assign(&mut self, other: &Self) {
        let du = self.deg_u().max(other.deg_u());
        let dv = self.deg_v().max(other.deg_v());
        self.c.resize(du + 1, vec![BigInt::zero(); dv + 1]);
        for row in &mut self.c {
            row.resize(dv + 1, BigInt::zero());
        }
        for (i, row) in other.c.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                self.c[i][j] += b;
            }
        }
    }

    fn d_u(&self) -> Self {
        let mut out = Self::zero(self.deg_u().saturating_sub(1), self.deg_v());
        for i in 1..self.c.len() {
            for (j, a) in self.c[i].iter().enumerate() {
                out.c[i - 1][j] = a * i;
            }
        }
        out
    }

    fn d_v(&self) -> Self {
        let mut out = Self::zero(self.deg_u(), self.deg_v().saturating_sub(1));
        for (i, row) in self.c.iter().enumerate() {
            for j in 1..row.len() {
                out.c[i][j - 1] = &row[j] * j;
            }
        }
        out
    }

    fn div_exact(&self, d: &BigInt) -> Result<Self> {
        let mut out = self.clone();
        for row in &mut out.c {
            for a in row.iter_mut() {
                let (q, r) = a.div_rem(d);
                if !r.is_zero() {
                    return Err(Error::Arithmetic(format!(
                        "coefficient {a} not divisible by {d}"
                    )));
                }
                *a = q;
            }
        }
        Ok(out)
    }
}

fn into_table(
    n: usize,
    method: TableMethod,
    coeff: impl Fn(usize, usize) -> BigInt,
) -> Result<BivariateDescentTable> {
    let mut cells = vec![vec![BigUint::zero(); n]; n];
    for (r, row) in cells.iter_mut().enumerate() {
        for (s, cell) in row.iter_mut().enumerate() {
            let c = coeff(r + 1, s + 1);
            *cell = match c.to_biguint() {
                Some(u) => u,
                None => {
                    return Err(Error::Arithmetic(format!(
                        "negative coefficient {c} at (r, s) = ({}, {})",
                        r + 1,
                        s + 1
                    )))
                }
            };
        }
    }
    Ok(BivariateDescentTable { n, method, cells })
}

/// Coefficients of
/// `A_n(u, v) = (1-u)^{n+1} (1-v)^{n+1} Σ_{k,l >= 0} C(kl+n-1, n) u^k v^l`.
///
/// `A_n` has degree at most `n` in each variable, and coefficients of
/// degree `<= n` only involve series terms with `k, l <= n`, so the series
/// is truncated there.
pub fn bivariate_gf(n: usize) -> Result<BivariateDescentTable> {
    bivariate_gf_with_cap(n, DEFAULT_GF_CAP)
}

pub fn bivariate_gf_with_cap(n: usize, cap: usize) -> Result<BivariateDescentTable> {
    check_n(n, "bivariate table (generating function)", cap)?;
    let big_n = BigUint::from(n);
    let series: Vec<Vec<BigInt>> = (0..=n)
        .map(|k| {
            (0..=n)
                .map(|l| {
                    // C(kl + n - 1, n) vanishes when kl = 0.
                    if k == 0 || l == 0 {
                        BigInt::zero()
                    } else {
                        BigInt::from(binomial(BigUint::from(k * l + n - 1), big_n.clone()))
                    }
                })
                .collect()
        })
        .collect();
    // (1 - x)^{n+1} = Σ_m (-1)^m C(n+1, m) x^m
    let factor: Vec<BigInt> = (0..=n)
        .map(|m| {
            let c = BigInt::from(binomial(BigUint::from(n + 1), BigUint::from(m)));
            if m % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    let mut in_u = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for a in 0..=n {
        for l in 0..=n {
            in_u[a][l] = (0..=a).map(|m| &factor[m] * &series[a - m][l]).sum();
        }
    }
    let mut full = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for a in 0..=n {
        for b in 0..=n {
            full[a][b] = (0..=b).map(|m| &factor[m] * &in_u[a][b - m]).sum();
        }
    }
    if (0..=n).any(|i| !full[0][i].is_zero() || !full[i][0].is_zero()) {
        return Err(Error::Arithmetic(
            "generating function has a term of degree 0 in u or v".into(),
        ));
    }
    into_table(n, TableMethod::Gf, |r, s| full[r][s].clone())
}

/// Builds `A_n(u, v)` from `A_1 = uv` with
///
/// ```text
/// m A_m = (m² uv + (m-1)(1-u)(1-v)) A_{m-1}
///       + m uv (1-u) ∂_u A_{m-1} + m uv (1-v) ∂_v A_{m-1}
///       + uv (1-u)(1-v) ∂_u ∂_v A_{m-1}
/// ```
///
/// dividing by `m` exactly at every step.
pub fn bivariate_recurrence(n: usize) -> Result<BivariateDescentTable> {
    if n == 0 {
        return Err(Error::InvalidSize("bivariate table requires n >= 1".into()));
    }
    let uv = Poly2::from_terms(&[(1, 1, 1)]);
    let one_minus_u = Poly2::from_terms(&[(1, 0, 0), (-1, 1, 0)]);
    let one_minus_v = Poly2::from_terms(&[(1, 0, 0), (-1, 0, 1)]);
    let both = one_minus_u.mul(&one_minus_v);
    let uv_both = uv.mul(&both);
    let uv_u = uv.mul(&one_minus_u);
    let uv_v = uv.mul(&one_minus_v);

    let mut a = uv.clone();
    for m in 2..=n {
        let mi = m as i64;
        let mut lead = Poly2::from_terms(&[(mi * mi, 1, 1)]);
        let mut scaled_both = both.clone();
        for row in &mut scaled_both.c {
            for x in row.iter_mut() {
                *x *= mi - 1;
            }
        }
        lead.add_assign(&scaled_both);

        let du = a.d_u();
        let dv = a.d_v();
        let duv = du.d_v();
        let mut next = lead.mul(&a);
        let mut t = uv_u.mul(&du);
        t.add_assign(&uv_v.mul(&dv));
        for row in &mut t.c {
            for x in row.iter_mut() {
                *x *= mi;
            }
        }
        next.add_assign(&t);
        next.add_assign(&uv_both.mul(&duv));
        a = next.div_exact(&BigInt::from(m))?;
        trim(&mut a, m);
    }
    let deg_ok = a
        .c
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, x)| x.is_zero() || (i <= n && j <= n)));
    if !deg_ok {
        return Err(Error::Arithmetic("recurrence produced degree above n".into()));
    }
    into_table(n, TableMethod::Recurrence, |r, s| {
        a.c.get(r)
            .and_then(|row| row.get(s))
            .cloned()
            .unwrap_or_default()
    })
}

/// Drops rows and columns beyond degree `m` once they are verified zero.
fn trim(p: &mut Poly2, m: usize) {
    while p.c.len() > m + 1 && p.c.last().is_some_and(|row| row.iter().all(Zero::is_zero)) {
        p.c.pop();
    }
    while p.c[0].len() > m + 1 && p.c.iter().all(|row| row.last().is_some_and(Zero::is_zero)) {
        for row in &mut p.c {
            row.pop();
        }
    }
}

/// Law of `T = D(π) + D(π⁻¹)`: `#{T = t} = Σ_{r+s-2=t} A(n, r, s)`.
pub fn t_distribution(table: &BivariateDescentTable) -> ExactDistribution {
    let n = table.n;
    let mut counts = vec![BigUint::zero(); 2 * n - 1];
    for (r, row) in table.cells.iter().enumerate() {
        for (s, c) in row.iter().enumerate() {
            counts[r + s] += c;
        }
    }
    ExactDistribution::from_counts(
        n,
        counts
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (t as i64, c)),
    )
}

/// Which statement of the support condition to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CarlitzRule {
    /// `A(n,r,s) = 0 ⟺ r >= (s-1)/s · n + 1`, read literally.
    Displayed,
    /// `A(n,r,s) = 0 ⟺ r > (s-1)/s · n + 1 or s > (r-1)/r · n + 1`.
    Strict,
}

/// Whether the rule predicts `A(n, r, s) = 0` (1-based `r`, `s`).
pub fn carlitz_predicts_zero(rule: CarlitzRule, n: usize, r: usize, s: usize) -> bool {
    // Cleared of denominators: r >= (s-1)n/s + 1  <=>  rs >= (s-1)n + s.
    let beyond = |a: usize, b: usize| (a * b, (b - 1) * n + b);
    match rule {
        CarlitzRule::Displayed => {
            let (lhs, rhs) = beyond(r, s);
            lhs >= rhs
        }
        CarlitzRule::Strict => {
            let (l1, r1) = beyond(r, s);
            let (l2, r2) = beyond(s, r);
            l1 > r1 || l2 > r2
        }
    }
}

/// Cells where vanishing and the rule's prediction disagree.
pub fn carlitz_mismatches(table: &BivariateDescentTable, rule: CarlitzRule) -> Vec<(usize, usize)> {
    let n = table.n;
    let mut out = Vec::new();
    for r in 1..=n {
        for s in 1..=n {
            let zero = table.cells[r - 1][s - 1].is_zero();
            if zero != carlitz_predicts_zero(rule, n, r, s) {
                out.push((r, s));
            }
        }
    }
    out
}

/// True iff every cell satisfies the rule in both directions.
pub fn carlitz_support_check(table: &BivariateDescentTable, rule: CarlitzRule) -> bool {
    carlitz_mismatches(table, rule).is_empty()
}

impl BivariateDescentTable {
    /// Sum of the cells with `r + s - 2 = t`.
    pub fn anti_diagonal_sum(&self, t: usize) -> BigUint {
        let mut total = BigUint::zero();
        for r in 1..=self.n {
            if let Some(s) = (t + 2).checked_sub(r) {
                total += self.get(r, s);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::eulerian_row;

    fn cell(t: &BivariateDescentTable, r: usize, s: usize) -> u64 {
        (&t.get(r, s)).try_into().unwrap()
    }

    #[test]
    fn brute_small_tables() {
        let t2 = bivariate_brute(2).unwrap();
        assert_eq!(cell(&t2, 1, 1), 1);
        assert_eq!(cell(&t2, 2, 2), 1);
        assert_eq!(cell(&t2, 1, 2), 0);
        assert_eq!(cell(&t2, 2, 1), 0);

        let t3 = bivariate_brute(3).unwrap();
        for r in 1..=3 {
            for s in 1..=3 {
                let expected = if r == s { [1, 4, 1][r - 1] } else { 0 };
                assert_eq!(cell(&t3, r, s), expected);
            }
        }

        // D = 2 with D⁻¹ = 1 at n = 4: only 3 1 4 2 (see next test).
        let t4 = bivariate_brute(4).unwrap();
        assert_eq!(cell(&t4, 3, 2), 1);
        assert!(matches!(bivariate_brute(11), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn the_single_n4_permutation_with_d2_dinv1() {
        let hits: Vec<_> = enumerate(4)
            .unwrap()
            .filter(|p| {
                descents_of(p.as_zero_based()) == 2 && descents_of(p.inverse().as_zero_based()) == 1
            })
            .collect();
        assert_eq!(hits, vec!["3 1 4 2".parse().unwrap()]);
    }

    #[test]
    fn three_methods_agree() {
        for n in 1..=8 {
            let brute = bivariate_brute(n).unwrap();
            let gf = bivariate_gf(n).unwrap();
            let rec = bivariate_recurrence(n).unwrap();
            assert_eq!(gf, brute, "gf vs brute at n={n}");
            assert_eq!(rec, brute, "recurrence vs brute at n={n}");
            assert_eq!(rec.method(), TableMethod::Recurrence);
        }
        assert_eq!(bivariate_recurrence(12).unwrap(), bivariate_gf(12).unwrap());
        assert_eq!(cell(&bivariate_recurrence(1).unwrap(), 1, 1), 1);
    }

    #[test]
    fn tables_are_symmetric_with_eulerian_margins() {
        for n in 1..=20 {
            let t = bivariate_gf(n).unwrap();
            assert!(t.is_symmetric());
            assert_eq!(t.row_sums(), eulerian_row(n).unwrap().dense_counts());
        }
    }

    #[test]
    fn gf_cap() {
        assert!(matches!(bivariate_gf(61), Err(Error::CapExceeded { .. })));
        assert!(bivariate_gf_with_cap(61, 61).is_ok());
    }

    #[test]
    fn t_laws() {
        let t2 = t_distribution(&bivariate_brute(2).unwrap());
        assert_eq!(t2.values, vec![(0, 1u8.into()), (2, 1u8.into())]);
        let t3 = t_distribution(&bivariate_brute(3).unwrap());
        assert_eq!(
            t3.values,
            vec![(0, 1u8.into()), (2, 4u8.into()), (4, 1u8.into())]
        );
        let t8 = t_distribution(&bivariate_gf(8).unwrap());
        assert_eq!(t8.total(), BigUint::from(40320u32));
        let table = bivariate_gf(8).unwrap();
        for (t, c) in &t8.values {
            assert_eq!(&table.anti_diagonal_sum(*t as usize), c);
        }
    }

    #[test]
    fn carlitz_rules() {
        // The literal statement predicts zero at (1, 1), where the identity sits.
        assert!(carlitz_predicts_zero(CarlitzRule::Displayed, 4, 1, 1));
        assert!(!carlitz_predicts_zero(CarlitzRule::Strict, 4, 1, 1));
        for n in 1..=9 {
            let t = bivariate_brute(n).unwrap();
            assert!(carlitz_support_check(&t, CarlitzRule::Strict), "n={n}");
            assert!(carlitz_mismatches(&t, CarlitzRule::Displayed).contains(&(1, 1)));
        }
        assert!(carlitz_support_check(&bivariate_gf(30).unwrap(), CarlitzRule::Strict));
    }

    #[test]
    fn exports() {
        let t = bivariate_brute(2).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "r,s,count\n1,1,1\n1,2,0\n2,1,0\n2,2,1\n"
        );
        let json = serde_json::to_value(t.to_json()).unwrap();
        assert_eq!(json["n"], 2);
        assert_eq!(json["method"], "brute");
        assert_eq!(json["cells"][3]["count"], "1");
    }
}
