//! Benchmarks comparing the sequential and rayon-parallel drivers on the
//! two data-parallel workloads: one 64-scan campaign and a 16-run Monte
//! Carlo batch.
//!
//! Run with `cargo bench -p neutron-ghz`; add `--no-default-features` to
//! bench the sequential build alone.

use criterion::{criterion_group, criterion_main, Criterion};
#[cfg(feature = "parallel")]
use neutron_ghz::experiment::{monte_carlo_mermin_parallel, simulate_dataset_parallel};
use neutron_ghz::experiment::{
    monte_carlo_mermin_sequential, simulate_dataset_sequential, ExperimentConfig,
};

fn dataset_benches(c: &mut Criterion) {
    let cfg = ExperimentConfig::default();
    let mut group = c.benchmark_group("simulate_dataset_64_scans");
    group.bench_function("sequential", |b| {
        b.iter(|| simulate_dataset_sequential(&cfg).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| simulate_dataset_parallel(&cfg).unwrap())
    });
    group.finish();
}

fn monte_carlo_benches(c: &mut Criterion) {
    let cfg = ExperimentConfig::default();
    let mut group = c.benchmark_group("monte_carlo_16_runs");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| monte_carlo_mermin_sequential(&cfg, 16).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| monte_carlo_mermin_parallel(&cfg, 16).unwrap())
    });
    group.finish();
}

criterion_group!(benches, dataset_benches, monte_carlo_benches);
criterion_main!(benches);
