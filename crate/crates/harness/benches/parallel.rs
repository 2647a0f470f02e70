//! Sequential vs parallel execution of representative sweep workloads. The
//! cells are identical work items either way; only the executor differs.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use subdiff_harness::config::{StudyConfig, StudyKind};
use subdiff_harness::par::{map_cells, map_cells_sequential, with_threads};
use subdiff_harness::studies::run_example1;
use subdiff_harness::verify::run_gronwall_suite;

fn gronwall_cells() -> Vec<(f64, f64, f64, u32)> {
    let mut grid = Vec::new();
    for alpha in [0.3, 0.5, 0.8] {
        for lambda in [0.5, 2.0] {
            for mask in 1u32..16 {
                grid.push((alpha, lambda, 0.005, mask));
            }
        }
    }
    grid
}

fn worst_case_cell((alpha, lambda, tau, mask): (f64, f64, f64, u32)) -> f64 {
    let params = subdiff::GronwallParams::new(
        alpha,
        lambda,
        f64::from(mask >> 1 & 1),
        f64::from(mask >> 2 & 1),
        f64::from(mask >> 3 & 1),
        1.5,
        0.5,
        tau,
        f64::from(mask & 1),
    )
    .unwrap();
    let y = subdiff::worst_case_sequence(&params, 256).unwrap();
    y[256]
}

fn bench_gronwall_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("gronwall_grid");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter_batched(
            gronwall_cells,
            |cells| map_cells_sequential(cells, worst_case_cell),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("parallel", |b| {
        b.iter_batched(
            gronwall_cells,
            |cells| map_cells(cells, worst_case_cell),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn example1_config() -> StudyConfig {
    StudyConfig {
        alphas: vec![0.4, 0.6],
        sigmas: vec![0.4, 0.8],
        ns: vec![20, 40, 80],
        ms: vec![128],
        ..StudyConfig::default_for(StudyKind::Example1)
    }
}

fn bench_example1_sweep(c: &mut Criterion) {
    let cfg = example1_config();
    let mut group = c.benchmark_group("example1_sweep");
    group.sample_size(10);
    group.bench_function("one_thread", |b| {
        b.iter(|| with_threads(1, || run_example1(&cfg).unwrap()))
    });
    group.bench_function("all_threads", |b| b.iter(|| run_example1(&cfg).unwrap()));
    group.finish();
}

fn bench_gronwall_suite(c: &mut Criterion) {
    let cfg = StudyConfig {
        alphas: vec![0.5],
        ns: vec![128],
        ..StudyConfig::default_for(StudyKind::Gronwall)
    };
    let mut group = c.benchmark_group("gronwall_suite");
    group.sample_size(10);
    group.bench_function("one_thread", |b| {
        b.iter(|| with_threads(1, || run_gronwall_suite(&cfg).unwrap()))
    });
    group.bench_function("all_threads", |b| b.iter(|| run_gronwall_suite(&cfg).unwrap()));
    group.finish();
}

criterion_group!(
    benches,
    bench_gronwall_grid,
    bench_example1_sweep,
    bench_gronwall_suite
);
criterion_main!(benches);
