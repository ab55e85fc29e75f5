use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use super::{run_blocks, Statistic};
use crate::error::{Error, Result};
use crate::points::PointConfiguration;
use crate::rng::SeededRng;

/// Degree bound quoted for the threshold-5 extension graph of `T`.
pub const STATED_DELTA_BOUND: usize = 10;

/// `{i, j}` is an edge iff the x-ranks or the y-ranks of points `i` and `j`
/// differ by at most `threshold`. Vertices are 0-based point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InteractionGraph {
    pub n: usize,
    pub threshold: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// True when every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Self) -> bool {
        self.n == other.n && self.edges.is_subset(&other.edges)
    }
}

pub fn build_graph(cfg: &PointConfiguration, threshold: usize) -> Result<InteractionGraph> {
    if threshold == 0 {
        return Err(Error::InvalidArgument("threshold must be >= 1".into()));
    }
    let mut edges = BTreeSet::new();
    for order in [cfg.order_by_x(), cfg.order_by_y()] {
        for (r, &a) in order.iter().enumerate() {
            for &b in order.iter().skip(r + 1).take(threshold) {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    Ok(InteractionGraph {
        n: cfg.len(),
        threshold,
        edges,
    })
}

/// Maximum vertex degree; at most `4 · threshold`.
pub fn degree_bound(g: &InteractionGraph) -> usize {
    g.degrees().into_iter().max().unwrap_or(0)
}

/// `f(X) - f(X with point j replaced by X'_j)`, `j` 0-based.
pub fn delta_j(
    stat: &Statistic,
    cfg: &PointConfiguration,
    other: &PointConfiguration,
    j: usize,
) -> Result<f64> {
    if cfg.len() != other.len() {
        return Err(Error::SizeMismatch {
            left: cfg.len(),
            right: other.len(),
        });
    }
    stat.check_size(cfg.len())?;
    let p = other.point(j).ok_or(Error::IndexOutOfRange {
        index: j,
        n: cfg.len(),
    })?;
    if cfg.point(j) == Some(p) {
        return Ok(0.0);
    }
    Ok(stat.eval_points(cfg) - stat.eval_points(&cfg.with_replaced(j, p)?))
}

fn adjacent(cfg: &PointConfiguration, i: usize, j: usize, t: usize) -> bool {
    cfg.x_rank_of(i).abs_diff(cfg.x_rank_of(j)) <= t || cfg.y_rank_of(i).abs_diff(cfg.y_rank_of(j)) <= t
}

/// Degree of vertex 0, and the larger of its per-axis neighbour counts.
fn vertex_zero_degree(cfg: &PointConfiguration, t: usize) -> (usize, usize) {
    let (xr, yr) = (cfg.x_ranks(), cfg.y_ranks());
    let (mut both, mut on_x, mut on_y) = (0, 0, 0);
    for k in 1..cfg.len() {
        let nx = xr[k].abs_diff(xr[0]) <= t;
        let ny = yr[k].abs_diff(yr[0]) <= t;
        on_x += usize::from(nx);
        on_y += usize::from(ny);
        both += usize::from(nx || ny);
    }
    (both, on_x.max(on_y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionOptions {
    /// Rank threshold of `G`; defaults to `degree - 1` of the statistic.
    pub threshold: Option<usize>,
    /// Every this many trials, `M` is computed over all `n` coordinates
    /// rather than only the sampled ones.
    pub full_sweep_every: usize,
}

impl Default for InteractionOptions {
    fn default() -> Self {
        Self {
            threshold: None,
            full_sweep_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionReport {
    pub statistic: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub threshold: usize,
    pub extension_threshold: usize,
    /// Trials in which `{i, j}` was absent from all four graphs.
    pub checked: usize,
    pub violations: usize,
    /// Largest single-coordinate change seen.
    #[serde(rename = "M")]
    pub m: f64,
    /// Largest `1 + degree of vertex 1` in the extension graph on `n + 4` points.
    pub delta: usize,
    /// Largest neighbour count of vertex 1 along a single rank axis.
    pub max_axis_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_stated_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_within_stated_bound: Option<bool>,
    pub full_sweeps: usize,
    /// Mean of `|Δ_J f|` and `|Δ_J f|³` for a uniform coordinate `J`.
    pub abs_delta_mean: f64,
    pub abs_delta_third_moment: f64,
    /// Sample `E(M⁸)` over full sweeps and `E(δ⁴)` over all trials.
    pub m_eighth_moment: f64,
    pub delta_fourth_moment: f64,
}

#[derive(Default)]
struct Partial {
    checked: usize,
    violations: usize,
    m: f64,
    delta: usize,
    axis: usize,
    sweeps: usize,
    abs_sum: f64,
    abs3_sum: f64,
    m8_sum: f64,
    delta4_sum: f64,
}

fn identity_holds(lhs: f64, rhs: f64, exact: bool) -> bool {
    if exact {
        lhs == rhs
    } else {
        (lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs()))
    }
}

/// Randomized test of the non-interaction identity
/// `f(x) - f(x^j) = f(x^i) - f(x^{ij})` for pairs `{i, j}` that are not
/// edges of `G(x)`, `G(x^i)`, `G(x^j)` or `G(x^{ij})`.
pub fn check_interaction_rule(
    stat: &Statistic,
    n: usize,
    trials: usize,
    rng: &mut SeededRng,
    opts: InteractionOptions,
) -> Result<InteractionReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidSize("interaction check requires n >= 2".into()));
    }
    stat.check_size(n)?;
    let t = opts.threshold.unwrap_or(stat.degree().saturating_sub(1)).max(1);
    if opts.threshold == Some(0) {
        return Err(Error::InvalidArgument("threshold must be >= 1".into()));
    }
    let ext_t = t + 4;
    let sweep_every = opts.full_sweep_every.max(1);
    let exact = stat.is_integer_valued();
    let seed = rng.seed();

    let parts = run_blocks(trials, rng, |len, r| {
        let mut acc = Partial::default();
        for step in 0..len {
            let x = PointConfiguration::sample(n, r)?;
            let y = PointConfiguration::sample(n, r)?;
            let i = r.random_range(0..n);
            let j = (i + r.random_range(1..n)) % n;
            let pi = y.point(i).expect("index in range");
            let pj = y.point(j).expect("index in range");
            let xi = x.with_replaced(i, pi)?;
            let xj = x.with_replaced(j, pj)?;
            let xij = xi.with_replaced(j, pj)?;
            let (f, fi, fj, fij) = (
                stat.eval_points(&x),
                stat.eval_points(&xi),
                stat.eval_points(&xj),
                stat.eval_points(&xij),
            );
            let dj = (f - fj).abs();
            acc.abs_sum += dj;
            acc.abs3_sum += dj.powi(3);
            acc.m = acc
                .m
                .max(dj)
                .max((f - fi).abs())
                .max((fi - fij).abs())
                .max((fj - fij).abs());

            let apart = [&x, &xi, &xj, &xij].iter().all(|c| !adjacent(c, i, j, t));
            if apart {
                acc.checked += 1;
                if !identity_holds(f - fj, fi - fij, exact) {
                    acc.violations += 1;
                }
            }

            let ext = PointConfiguration::sample(n + 4, r)?;
            let (deg, axis) = vertex_zero_degree(&ext, ext_t);
            acc.delta = acc.delta.max(deg + 1);
            acc.axis = acc.axis.max(axis);
            acc.delta4_sum += ((deg + 1) as f64).powi(4);

            if step % sweep_every == 0 {
                let mut m_full: f64 = 0.0;
                for k in 0..n {
                    let moved = x.with_replaced(k, y.point(k).expect("index in range"))?;
                    m_full = m_full.max((f - stat.eval_points(&moved)).abs());
                }
                acc.sweeps += 1;
                acc.m = acc.m.max(m_full);
                acc.m8_sum += m_full.powi(8);
            }
        }
        Ok(acc)
    })?;

    let mut total = Partial::default();
    for p in parts {
        total.checked += p.checked;
        total.violations += p.violations;
        total.m = total.m.max(p.m);
        total.delta = total.delta.max(p.delta);
        total.axis = total.axis.max(p.axis);
        total.sweeps += p.sweeps;
        total.abs_sum += p.abs_sum;
        total.abs3_sum += p.abs3_sum;
        total.m8_sum += p.m8_sum;
        total.delta4_sum += p.delta4_sum;
    }
    let stated = (t == 1).then_some(STATED_DELTA_BOUND);
    Ok(InteractionReport {
        statistic: stat.name().to_string(),
        n,
        trials,
        seed,
        threshold: t,
        extension_threshold: ext_t,
        checked: total.checked,
        violations: total.violations,
        m: total.m,
        delta: total.delta,
        max_axis_degree: total.axis,
        delta_stated_bound: stated,
        delta_within_stated_bound: stated.map(|b| total.delta <= b),
        full_sweeps: total.sweeps,
        abs_delta_mean: total.abs_sum / trials as f64,
        abs_delta_third_moment: total.abs3_sum / trials as f64,
        m_eighth_moment: total.m8_sum / total.sweeps.max(1) as f64,
        delta_fourth_moment: total.delta4_sum / trials as f64,
    })
}

/// The two terms of the normal-approximation bound, without the unknown
/// universal constant `C` that multiplies `term1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerms {
    /// `√n σ⁻² E(M⁸)^{1/4} E(δ⁴)^{1/4}` with `M`, `δ` at their bounds.
    pub term1: f64,
    /// `(1 / 2σ³) Σ_j E|Δ_j f|³`.
    pub term2: f64,
    pub term1_constant: &'static str,
}

pub fn bound_terms(
    m_bound: f64,
    delta_bound: f64,
    sigma: f64,
    n: usize,
    abs_delta_third_moments: &[f64],
) -> Result<BoundTerms> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let term1 = (n as f64).sqrt() / sigma.powi(2) * m_bound.powi(2) * delta_bound;
    let term2 = abs_delta_third_moments.iter().sum::<f64>() / (2.0 * sigma.powi(3));
    Ok(BoundTerms {
        term1,
        term2,
        term1_constant: "C",
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub sigma: f64,
    pub abs_delta_third_moment: f64,
    pub term1: f64,
    pub term2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundScaling {
    pub statistic: String,
    pub seed: u64,
    pub m_bound: f64,
    pub delta_bound: f64,
    pub samples: usize,
    pub rows: Vec<BoundRow>,
    /// Least-squares slopes of `ln term` against `ln n`.
    pub slope_term1: f64,
    pub slope_term2: f64,
    /// Label of the unspecified constant multiplying `term1`.
    pub term1_constant: &'static str,
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Evaluates both terms at each `n`, with `σ` from the exact variance and
/// `E|Δ_J f|³` estimated from `samples` random replacements.
pub fn bound_scaling(
    stat: &Statistic,
    ns: &[usize],
    m_bound: f64,
    delta_bound: f64,
    samples: usize,
    rng: &mut SeededRng,
) -> Result<BoundScaling> {
    if ns.len() < 2 {
        return Err(Error::InvalidArgument("need at least two sizes for a slope".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let seed = rng.seed();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        stat.check_size(n)?;
        let (_, variance, _, _) = stat.exact_moments(n)?.ok_or_else(|| {
            Error::InvalidArgument(format!("no exact variance for {stat} at n = {n}"))
        })?;
        let sigma = variance.sqrt();
        let sums = run_blocks(samples, rng, |len, r| {
            let mut s = 0.0;
            for _ in 0..len {
                let x = PointConfiguration::sample(n, r)?;
                let y = PointConfiguration::sample(n, r)?;
                let j = r.random_range(0..n);
                s += delta_j(stat, &x, &y, j)?.abs().powi(3);
            }
            Ok(s)
        })?;
        let third = sums.iter().sum::<f64>() / samples as f64;
        let terms = bound_terms(m_bound, delta_bound, sigma, n, &vec![third; n])?;
        rows.push(BoundRow {
            n,
            sigma,
            abs_delta_third_moment: third,
            term1: terms.term1,
            term2: terms.term2,
        });
    }
    let slope = |f: fn(&BoundRow) -> f64| {
        log_log_slope(&rows.iter().map(|r| (r.n as f64, f(r))).collect::<Vec<_>>())
    };
    Ok(BoundScaling {
        statistic: stat.name().to_string(),
        seed,
        m_bound,
        delta_bound,
        samples,
        slope_term1: slope(|r| r.term1),
        slope_term2: slope(|r| r.term2),
        rows,
        term1_constant: "C",
    })
}
