//! Planar point configurations and the rank construction of `(π, π⁻¹)`.
//!
//! Order the points by first coordinate; `π(i)` is the rank, by second
//! coordinate, of the point with `i`-th smallest first coordinate. Reading
//! the points in order of second coordinate and recording first-coordinate
//! ranks gives `σ`, and `σ = π⁻¹` always. For i.i.d. uniform points `π` is
//! uniform on `S_n`.
//!
//! Ties within a coordinate are broken by point index. Two identical points
//! cannot be told apart this way, so configurations containing them are
//! rejected at construction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rng::SeededRng;

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    points: Vec<Point>,
}

fn check_point(p: Point) -> Result<()> {
    let ok = |c: f64| (0.0..=1.0).contains(&c);
    if ok(p.0) && ok(p.1) {
        Ok(())
    } else {
        Err(Error::DegeneratePoints(format!(
            "point ({}, {}) outside [0,1]^2",
            p.0, p.1
        )))
    }
}

impl PointConfiguration {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSize("a configuration needs n >= 1 points".into()));
        }
        for &p in &points {
            check_point(p)?;
        }
        let cfg = Self { points };
        cfg.check_distinct(&cfg.order_by_x())?;
        Ok(cfg)
    }

    /// Equal points have equal first coordinates, so they sit in one run of
    /// the x-order.
    fn check_distinct(&self, by_x: &[usize]) -> Result<()> {
        let pts = &self.points;
        let mut start = 0;
        while start < by_x.len() {
            let x = pts[by_x[start]].0;
            let mut end = start + 1;
            while end < by_x.len() && pts[by_x[end]].0 == x {
                end += 1;
            }
            for a in start..end {
                for b in a + 1..end {
                    if pts[by_x[a]].1 == pts[by_x[b]].1 {
                        return Err(Error::DegeneratePoints(format!(
                            "duplicate point ({}, {})",
                            x,
                            pts[by_x[a]].1
                        )));
                    }
                }
            }
            start = end;
        }
        Ok(())
    }

    /// `n` i.i.d. uniform points on `[0,1)^2`.
    pub fn sample(n: usize, rng: &mut SeededRng) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("a configuration needs n >= 1 points".into()));
        }
        loop {
            let points = (0..n).map(|_| (rng.random(), rng.random())).collect();
            // Exact duplicates have probability ~n²·2⁻¹⁰⁶; redraw if it happens.
            if let Ok(cfg) = Self::new(points) {
                return Ok(cfg);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, j: usize) -> Option<Point> {
        self.points.get(j).copied()
    }

    /// Copy with point `j` (0-based) replaced.
    pub fn with_replaced(&self, j: usize, p: Point) -> Result<Self> {
        if j >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                n: self.len(),
            });
        }
        check_point(p)?;
        if self
            .points
            .iter()
            .enumerate()
            .any(|(k, &q)| k != j && q == p)
        {
            return Err(Error::DegeneratePoints(format!(
                "duplicate point ({}, {})",
                p.0, p.1
            )));
        }
        let mut points = self.points.clone();
        points[j] = p;
        Ok(Self { points })
    }

    /// Copy with extra points appended.
    pub fn extended(&self, extra: &[Point]) -> Result<Self> {
        let mut points = self.points.clone();
        points.extend_from_slice(extra);
        Self::new(points)
    }

    /// Point indices ordered by first coordinate (ties by index).
    pub fn order_by_x(&self) -> Vec<usize> {
        self.order_by(|p| p.0)
    }

    /// Point indices ordered by second coordinate (ties by index).
    pub fn order_by_y(&self) -> Vec<usize> {
        self.order_by(|p| p.1)
    }

    fn order_by(&self, coord: impl Fn(&Point) -> f64) -> Vec<usize> {
        // Coordinate key in the high half, index in the low half: equal
        // coordinates fall back to index order.
        let mut keyed: Vec<u128> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (u128::from(order_key(coord(p))) << 64) | i as u128)
            .collect();
        keyed.sort_unstable();
        keyed.into_iter().map(|k| k as u64 as usize).collect()
    }

    /// 0-based x-rank of every point.
    pub fn x_ranks(&self) -> Vec<usize> {
        invert_order(&self.order_by_x())
    }

    /// 0-based y-rank of every point.
    pub fn y_ranks(&self) -> Vec<usize> {
        invert_order(&self.order_by_y())
    }

    /// 0-based x-rank of point `j` alone, in `O(n)`.
    pub fn x_rank_of(&self, j: usize) -> usize {
        self.rank_of(j, |p| p.0)
    }

    /// 0-based y-rank of point `j` alone, in `O(n)`.
    pub fn y_rank_of(&self, j: usize) -> usize {
        self.rank_of(j, |p| p.1)
    }

    fn rank_of(&self, j: usize, coord: impl Fn(&Point) -> f64) -> usize {
        let c = coord(&self.points[j]);
        self.points
            .iter()
            .enumerate()
            .filter(|&(k, p)| {
                let d = coord(p);
                d < c || (d == c && k < j)
            })
            .count()
    }
}

/// Unsigned key whose order agrees with `f64::total_cmp`.
fn order_key(c: f64) -> u64 {
    let b = c.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn invert_order(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// The pair `(π, σ)` read off a configuration; `σ = π⁻¹`.
pub fn from_points(cfg: &PointConfiguration) -> (Permutation, Permutation) {
    ranked_pair(cfg.order_by_x(), cfg.order_by_y())
}

/// `from_points(&PointConfiguration::sample(n, rng)?)` without keeping the
/// configuration; consumes the stream identically.
pub fn sample_from_points(n: usize, rng: &mut SeededRng) -> Result<(Permutation, Permutation)> {
    if n == 0 {
        return Err(Error::InvalidSize("a configuration needs n >= 1 points".into()));
    }
    loop {
        let cfg = PointConfiguration {
            points: (0..n).map(|_| (rng.random(), rng.random())).collect(),
        };
        let by_x = cfg.order_by_x();
        if cfg.check_distinct(&by_x).is_ok() {
            return Ok(ranked_pair(by_x, cfg.order_by_y()));
        }
    }
}

fn ranked_pair(by_x: Vec<usize>, by_y: Vec<usize>) -> (Permutation, Permutation) {
    let x_rank = invert_order(&by_x);
    let y_rank = invert_order(&by_y);
    let pi = by_x.iter().map(|&i| y_rank[i]).collect();
    let sigma = by_y.iter().map(|&i| x_rank[i]).collect();
    (
        Permutation::from_zero_based_unchecked(pi),
        Permutation::from_zero_based_unchecked(sigma),
    )
}
