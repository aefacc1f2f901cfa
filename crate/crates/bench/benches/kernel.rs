use std::hint::black_box;

use conekernel::section::symmetric_eigen;
use conekernel::special::{bessel_i_scaled_integral, log_bessel_i_scaled, log_bessel_i_scaled_series};
use conekernel::RadialSeries;
use conekernel_bench::{circle_evaluator, ring_matrix, sample_points, sphere_evaluator};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bessel(c: &mut Criterion) {
    let mut group = c.benchmark_group("bessel_i_scaled");
    for &(mu, z) in &[(0.35, 0.01), (2.3, 5.0), (10.0, 40.0), (3.0, 400.0), (60.0, 1250.0)] {
        let id = format!("mu={mu},z={z}");
        group.bench_with_input(BenchmarkId::new("dispatch", &id), &(mu, z), |b, &(mu, z)| {
            b.iter(|| log_bessel_i_scaled(black_box(mu), black_box(z)).unwrap())
        });
    }
    group.bench_function("series mu=3 z=40", |b| {
        b.iter(|| log_bessel_i_scaled_series(black_box(3.0), black_box(40.0)).unwrap())
    });
    group.bench_function("integral mu=3 z=40", |b| {
        b.iter(|| bessel_i_scaled_integral(black_box(3.0), black_box(40.0)).unwrap())
    });
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let points = sample_points();
    let mut group = c.benchmark_group("kernel");
    for (name, ev) in [("circle", circle_evaluator()), ("sphere", sphere_evaluator())] {
        group.bench_function(BenchmarkId::new("evaluate", name), |b| {
            b.iter(|| {
                for g in &points {
                    black_box(ev.evaluate_at(g).unwrap());
                }
            })
        });
        group.bench_function(BenchmarkId::new("evaluate_grid", name), |b| {
            b.iter(|| black_box(ev.evaluate_grid(&points)))
        });
    }
    let ev = circle_evaluator();
    group.bench_function("radial_series circle", |b| {
        b.iter(|| RadialSeries::new(&ev, black_box(0.4), black_box(1.0), black_box(1.3)).unwrap())
    });
    group.finish();
}

fn jacobi(c: &mut Criterion) {
    let mut group = c.benchmark_group("symmetric_eigen");
    group.sample_size(10);
    for &n in &[32usize, 64, 128] {
        let m = ring_matrix(n, 1.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| symmetric_eigen(black_box(m), n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bessel, kernel, jacobi);
criterion_main!(benches);
