use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use genpair_bench::fixtures;
use genpair_core::bethe::{solve_nonzero, solve_zero, SolverOptions};
use genpair_core::oracle::diagonalize_sector;
use genpair_core::state::nonzero_state;

fn middle(model: &genpair_core::ModelSpace) -> usize {
    (model.omega_total() / 2).max(2)
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for (name, model) in fixtures() {
        let n = middle(&model);
        group.bench_with_input(BenchmarkId::new("diagonalize", name), &n, |b, &n| {
            b.iter(|| diagonalize_sector(&model, n).unwrap())
        });
    }
    group.finish();
}

fn rapidities(c: &mut Criterion) {
    let opts = SolverOptions::default();
    let mut group = c.benchmark_group("rapidities");
    group.sample_size(10);
    for (name, model) in fixtures() {
        let n = middle(&model);
        group.bench_with_input(BenchmarkId::new("nonzero", name), &n, |b, &n| {
            b.iter(|| solve_nonzero(&model, n, &opts, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("zero", name), &n, |b, &n| {
            b.iter(|| solve_zero(&model, n, &opts).unwrap())
        });
    }
    group.finish();
}

fn states(c: &mut Criterion) {
    let opts = SolverOptions::default();
    let mut group = c.benchmark_group("states");
    for (name, model) in fixtures() {
        let n = middle(&model);
        let sol = solve_nonzero(&model, n, &opts, None)
            .unwrap()
            .solutions
            .remove(0);
        group.bench_function(BenchmarkId::new("expand", name), |b| {
            b.iter(|| nonzero_state(&model, &sol).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, oracle, rapidities, states);
criterion_main!(benches);
