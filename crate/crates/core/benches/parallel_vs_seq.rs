//! Parallel vs sequential throughput of the estimation kernels.
//!
//! The sharded parallel path and the sequential reference produce
//! bit-identical tallies; these benches measure what the parallelism buys
//! on the host machine.
//!
//! Run with `cargo bench -p psilc-core`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use psilc_core::ldt::{big_jump_main_term, crude_tallies_par, crude_tallies_seq};
use psilc_core::tails::{SamplerState, TailModel};

fn bench_crude(c: &mut Criterion) {
    let model = TailModel::pareto(-3.0).unwrap();
    let reps = 400_000u64;
    let mut group = c.benchmark_group("crude_tallies");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("seq", reps), &reps, |b, &reps| {
        b.iter(|| crude_tallies_seq(&model, 100, 100.0, reps, 42))
    });
    group.bench_with_input(BenchmarkId::new("par", reps), &reps, |b, &reps| {
        b.iter(|| crude_tallies_par(&model, 100, 100.0, reps, 42))
    });
    group.finish();
}

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampling");
    group.sample_size(20);
    for alpha in [-3.0, -1.5] {
        let model = TailModel::pareto(alpha).unwrap();
        group.bench_with_input(BenchmarkId::new("pareto", alpha), &model, |b, model| {
            b.iter(|| {
                let mut st = SamplerState::new(7);
                model.sample(100_000, &mut st)
            })
        });
    }
    group.finish();
}

fn bench_main_term(c: &mut Criterion) {
    let model = TailModel::pareto(-3.0).unwrap();
    let mut group = c.benchmark_group("big_jump_main_term");
    group.sample_size(10);
    group.bench_function("n100_reps2e5", |b| {
        b.iter(|| big_jump_main_term(&model, 100, 100.0, 200_000, 5.0, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_crude, bench_sampling, bench_main_term);
criterion_main!(benches);
