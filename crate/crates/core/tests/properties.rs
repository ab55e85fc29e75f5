use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use permclt_core::exact::{eulerian_row, formulas, kolmogorov_to_normal};
use permclt_core::lab::{self, empirical, Statistic};
use permclt_core::metrics::{distance, DescentGraph, MetricKind};
use permclt_core::perm::enumerate;
use permclt_core::stats::lis_length;
use permclt_core::{descents, from_points, t_statistic, Permutation, Point, PointConfiguration, SeededRng};

fn perm_strategy(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_zero_based(v).unwrap())
}

fn pair_strategy(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (1..=max_n).prop_flat_map(|n| {
        let base: Vec<usize> = (0..n).collect();
        (Just(base.clone()).prop_shuffle(), Just(base).prop_shuffle()).prop_map(|(a, b)| {
            (
                Permutation::from_zero_based(a).unwrap(),
                Permutation::from_zero_based(b).unwrap(),
            )
        })
    })
}

proptest! {
    #[test]
    fn inverse_is_an_involution(p in perm_strategy(3000)) {
        prop_assert_eq!(p.inverse().inverse(), p.clone());
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
    }

    #[test]
    fn t_is_inverse_invariant(p in perm_strategy(500)) {
        prop_assert_eq!(t_statistic(&p), t_statistic(&p.inverse()));
    }

    #[test]
    fn reversal_complements_descents(p in perm_strategy(500)) {
        let n = p.len();
        prop_assert!(descents(&p) < n.max(1));
        prop_assert_eq!(descents(&p.reversed()), n - 1 - descents(&p));
    }

    #[test]
    fn metrics_are_symmetric((p, q) in pair_strategy(9)) {
        for kind in MetricKind::ALL {
            if kind == MetricKind::DescentGraph {
                continue;
            }
            prop_assert_eq!(distance(kind, &p, &q).unwrap(), distance(kind, &q, &p).unwrap());
        }
    }

    #[test]
    fn lis_matches_quadratic_dp(p in perm_strategy(60)) {
        let v = p.one_line();
        let mut best = vec![1usize; v.len()];
        for i in 0..v.len() {
            for j in 0..i {
                if v[j] < v[i] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        prop_assert_eq!(lis_length(&p), best.into_iter().max().unwrap_or(0));
    }

    #[test]
    fn graph_distance_is_a_metric_below_the_edge(seed in any::<u64>(), n in 2usize..=6) {
        let g = DescentGraph::cached(n).unwrap();
        let mut rng = SeededRng::new(seed);
        let a = Permutation::sample_uniform(n, &mut rng).unwrap();
        let b = Permutation::sample_uniform(n, &mut rng).unwrap();
        let c = Permutation::sample_uniform(n, &mut rng).unwrap();
        let (ab, bc, ac) = (
            g.distance(&a, &b).unwrap(),
            g.distance(&b, &c).unwrap(),
            g.distance(&a, &c).unwrap(),
        );
        prop_assert!(ac <= ab + bc);
        prop_assert_eq!(ab, g.distance(&b, &a).unwrap());
        prop_assert!(ab <= distance(MetricKind::DescentEdge, &a, &b).unwrap());
        prop_assert_eq!(ab == 0, a == b);
    }
}

#[test]
fn graph_never_exceeds_edge_and_fraction_is_reported() {
    for n in 1..=6usize {
        let g = DescentGraph::cached(n).unwrap();
        let perms: Vec<Permutation> = enumerate(n).unwrap().collect();
        let mut equal = 0u64;
        for p in &perms {
            for q in &perms {
                let (d, w) = (g.distance(p, q).unwrap(), g.edge_weight(p, q).unwrap());
                assert!(d <= w);
                equal += u64::from(d == w);
            }
        }
        let total = (perms.len() * perms.len()) as u64;
        assert_eq!(g.edge_is_shortest_counts(), (equal, total));
        println!("n = {n}: edge is shortest for {equal} of {total} pairs ({:.4})", equal as f64 / total as f64);
    }
}

#[test]
fn points_give_uniform_s4() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let trials = 48_000usize;
    let mut counts = [0usize; 24];
    for _ in 0..trials {
        let pts: Vec<Point> = (0..4)
            .map(|_| -> Point { (rng.random(), rng.random()) })
            .collect();
        let (pi, sigma) = from_points(&PointConfiguration::new(pts).unwrap());
        assert_eq!(pi.inverse(), sigma);
        counts[pi.lex_rank() as usize] += 1;
    }
    let expected = trials as f64 / 24.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 23 degrees of freedom: mean 23, sd √46.
    assert!(chi2 < 23.0 + 4.0 * 46f64.sqrt(), "chi-square {chi2}");
}

#[test]
fn sampled_distances_track_the_exact_law() {
    let n = 40;
    let samples = 20_000;
    let row = eulerian_row(n).unwrap();
    let sd = formulas::descent_variance(n as i64);
    let sd = num_traits::ToPrimitive::to_f64(&sd).unwrap().sqrt();
    let exact_ks = kolmogorov_to_normal(&row, &formulas::descent_mean(n as i64), sd).unwrap();
    let mut rng = SeededRng::new(4);
    let report = lab::mc_statistic_with(
        &Statistic::D,
        n,
        samples,
        &mut rng,
        lab::McOptions { keep_values: true, ..Default::default() },
    )
    .unwrap();
    let tol = 2.0 / (samples as f64).sqrt();
    assert!((report.ks - exact_ks).abs() <= tol, "ks {} vs exact {exact_ks}", report.ks);
    let mut values: Vec<f64> = report
        .values
        .iter()
        .map(|v| (v - report.center) / report.scale)
        .collect();
    assert!((empirical::ks_to_normal(&mut values) - report.ks).abs() < 1e-12);
}

#[test]
fn monte_carlo_reports_are_seed_deterministic() {
    for stat in [Statistic::D, Statistic::T, Statistic::PeaksPair] {
        let a = lab::mc_statistic(&stat, 30, 1500, &mut SeededRng::new(8)).unwrap();
        let b = lab::mc_statistic(&stat, 30, 1500, &mut SeededRng::new(8)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
