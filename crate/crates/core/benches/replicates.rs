//! Replicate-throughput bench: the work-stealing path against the plain
//! sequential loop on identical configurations. On one core the two should
//! be within noise of each other; the gap on multicore machines is the
//! point of the `parallel` feature.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use epitrace_core::experiment::{
    collect_records, collect_records_sequential, Algorithm, ExperimentConfig, ModelKind, Sweep,
};

fn config(model: ModelKind, n: usize, replicates: usize) -> ExperimentConfig {
    ExperimentConfig {
        model,
        algorithms: vec![Algorithm::Ls, Algorithm::LsPlus],
        n: Sweep::Fixed(n),
        replicates,
        base_seed: 17,
        ..ExperimentConfig::default()
    }
}

fn bench_replicates(c: &mut Criterion) {
    let mut group = c.benchmark_group("replicates");
    group.sample_size(10);
    for (label, cfg) in [
        ("household-n99", config(ModelKind::HnmDde, 99, 64)),
        ("household-n399", config(ModelKind::HnmDde, 399, 16)),
        ("tree", config(ModelKind::RbtreeDdenr, 399, 64)),
    ] {
        group.bench_with_input(BenchmarkId::new("parallel", label), &cfg, |b, cfg| {
            b.iter(|| collect_records(cfg).unwrap());
        });
        group.bench_with_input(BenchmarkId::new("sequential", label), &cfg, |b, cfg| {
            b.iter(|| collect_records_sequential(cfg).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_replicates);
criterion_main!(benches);
