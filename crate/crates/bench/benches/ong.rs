use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ong_bench::uniform_sequence;
use ong_core::{build_ong_with, resample_delta, totals_at, voronoi_diameter, NnMode, Point, RandomStream};

fn builds(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for d in [1, 2, 3] {
        for n in [1_000, 10_000, 100_000] {
            let seq = uniform_sequence(n, d, 1);
            g.throughput(Throughput::Elements(n as u64));
            g.bench_with_input(BenchmarkId::new(format!("grid/d{d}"), n), &seq, |b, s| {
                b.iter(|| build_ong_with(black_box(s), NnMode::Grid).unwrap())
            });
            if n <= 10_000 {
                g.bench_with_input(BenchmarkId::new(format!("brute/d{d}"), n), &seq, |b, s| {
                    b.iter(|| build_ong_with(black_box(s), NnMode::BruteForce).unwrap())
                });
            }
        }
    }
    g.finish();
}

fn streaming_totals(c: &mut Criterion) {
    let mut g = c.benchmark_group("totals");
    let seq = uniform_sequence(100_000, 2, 2);
    g.throughput(Throughput::Elements(100_000));
    for alpha in [0.5, 1.0, 2.0, 0.75] {
        g.bench_with_input(BenchmarkId::from_parameter(alpha), &alpha, |b, &a| {
            b.iter(|| totals_at(black_box(&seq), a, &[100_000], NnMode::Grid).unwrap())
        });
    }
    g.finish();
}

fn resample(c: &mut Criterion) {
    let seq = uniform_sequence(256, 1, 3);
    let x = Point::new(vec![0.37]).unwrap();
    c.bench_function("resample_delta/n256/i32", |b| {
        b.iter(|| resample_delta(black_box(&seq), 32, &x, 1.0, NnMode::Grid).unwrap())
    });
}

fn voronoi(c: &mut Criterion) {
    let seq = uniform_sequence(16_384, 2, 4);
    let x = Point::new(vec![0.5, 0.5]).unwrap();
    c.bench_function("voronoi_diameter/d2/n16384/rays64", |b| {
        let mut rng = RandomStream::new(5).rng();
        b.iter(|| voronoi_diameter(&x, black_box(&seq), 64, &mut rng).unwrap())
    });
}

criterion_group!(benches, builds, streaming_totals, resample, voronoi);
criterion_main!(benches);
