use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pantograph::heat::{evolve, spectral_density, InitialDatum, UniformGrid};
use pantograph::rational::rat;
use pantograph::transport::functional_burgers;
use pantograph::truncation::analyze_range;
use pantograph::zeros::{locate_zeros, sign_pattern_check};
use pantograph::{Budget, Exec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn zeros(c: &mut Criterion) {
    let b = Budget::default();
    let mut g = c.benchmark_group("zeros");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("sign_pattern_15", name), &exec, |bch, &e| {
            bch.iter(|| sign_pattern_check(15, &b, e))
        });
        g.bench_with_input(BenchmarkId::new("locate_20", name), &exec, |bch, &e| {
            bch.iter(|| locate_zeros(20, &rat(1, 1_000_000), &b, e).unwrap())
        });
    }
    g.finish();
}

fn truncation(c: &mut Criterion) {
    let mut g = c.benchmark_group("truncation");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("analyze_3_25", name), &exec, |bch, &e| {
            bch.iter(|| analyze_range(3..=25, &rat(1, 1 << 20), e))
        });
    }
    g.finish();
}

fn heat(c: &mut Criterion) {
    let tol = 1e-8;
    let sd = spectral_density(&InitialDatum::gaussian(1.0), 1.0, tol).unwrap();
    let grid = UniformGrid::new(-6.0, 6.0, 201).unwrap();
    let mut g = c.benchmark_group("heat");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("evolve_t1_201", name), &exec, |bch, &e| {
            bch.iter(|| evolve(&sd, 1.0, &grid, tol, e).unwrap())
        });
    }
    g.finish();
}

fn transport(c: &mut Criterion) {
    let mut g = c.benchmark_group("transport");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("functional_t1_512", name), &exec, |bch, &e| {
            bch.iter(|| functional_burgers(1.0, 512, 0.01, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, zeros, truncation, heat, transport);
criterion_main!(benches);
