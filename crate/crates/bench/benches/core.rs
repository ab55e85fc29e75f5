use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use permclt_core::exact::{bivariate_gf, bivariate_recurrence, eulerian_row};
use permclt_core::lab::{self, Sampler, Statistic};
use permclt_core::metrics::{DescentGraph, MetricKind};
use permclt_core::{descents, sample_from_points, t_statistic, Permutation, SeededRng};

fn exact_laws(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    for n in [50, 200] {
        g.bench_with_input(BenchmarkId::new("eulerian_row", n), &n, |b, &n| {
            b.iter(|| eulerian_row(black_box(n)).unwrap())
        });
    }
    for n in [10, 25] {
        g.bench_with_input(BenchmarkId::new("bivariate_recurrence", n), &n, |b, &n| {
            b.iter(|| bivariate_recurrence(black_box(n)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bivariate_gf", n), &n, |b, &n| {
            b.iter(|| bivariate_gf(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn statistics(c: &mut Criterion) {
    let mut rng = SeededRng::new(1);
    let p = Permutation::sample_uniform(10_000, &mut rng).unwrap();
    let mut g = c.benchmark_group("statistics");
    g.bench_function("descents_1e4", |b| b.iter(|| descents(black_box(&p))));
    g.bench_function("t_statistic_1e4", |b| b.iter(|| t_statistic(black_box(&p))));
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sampling");
    for n in [100, 10_000] {
        g.bench_with_input(BenchmarkId::new("from_points", n), &n, |b, &n| {
            let mut rng = SeededRng::new(2);
            b.iter(|| sample_from_points(n, &mut rng).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("shuffle", n), &n, |b, &n| {
            let mut rng = SeededRng::new(2);
            b.iter(|| Sampler::Shuffle.draw(n, &mut rng).unwrap())
        });
    }
    g.sample_size(10);
    g.bench_function("mc_t_n1000_2000", |b| {
        b.iter(|| lab::mc_statistic(&Statistic::T, 1000, 2000, &mut SeededRng::new(3)).unwrap())
    });
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let mut rng = SeededRng::new(4);
    let p = Permutation::sample_uniform(7, &mut rng).unwrap();
    let q = Permutation::sample_uniform(7, &mut rng).unwrap();
    let graph = DescentGraph::cached(7).unwrap();
    let mut g = c.benchmark_group("metrics");
    g.bench_function("graph_distance_n7_lookup", |b| {
        b.iter(|| graph.distance(black_box(&p), black_box(&q)).unwrap())
    });
    g.sample_size(10);
    g.bench_function("graph_build_n6", |b| b.iter(|| DescentGraph::new(6).unwrap()));
    let big_p = Permutation::sample_uniform(2000, &mut rng).unwrap();
    let big_q = Permutation::sample_uniform(2000, &mut rng).unwrap();
    for kind in [MetricKind::Kendall, MetricKind::Ulam, MetricKind::Cayley] {
        g.bench_function(format!("{}_n2000", kind.name()), |b| {
            b.iter(|| permclt_core::metrics::distance(kind, &big_p, &big_q).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, exact_laws, statistics, sampling, metrics);
criterion_main!(benches);
