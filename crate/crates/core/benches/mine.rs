use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fuim::generate::{generate, GeneratorConfig};
use fuim::{mine, FuzzyDatabase, MembershipFunction, MinerConfig, Threshold, Variant};

fn synthetic() -> fuim::QuantitativeDatabase {
    generate(&GeneratorConfig {
        items: 200,
        transactions: 5_000,
        avg_len: 8.0,
        seed: 7,
        ..Default::default()
    })
    .unwrap()
}

fn sequential_vs_parallel(c: &mut Criterion) {
    let db = synthetic();
    let mf = MembershipFunction::bundled();
    let fdb = FuzzyDatabase::new(&db, &mf);
    let mut group = c.benchmark_group("mine");
    group.sample_size(10);
    for rate in [0.002, 0.005] {
        let gamma = Threshold::Rate(rate).resolve(&db).unwrap();
        for parallel in [false, true] {
            let label = if parallel { "parallel" } else { "sequential" };
            let cfg = MinerConfig {
                parallel,
                ..MinerConfig::new(gamma)
            };
            group.bench_with_input(BenchmarkId::new(label, rate), &cfg, |b, cfg| {
                b.iter(|| mine(&fdb, cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn variants(c: &mut Criterion) {
    let db = synthetic();
    let mf = MembershipFunction::bundled();
    let fdb = FuzzyDatabase::new(&db, &mf);
    let gamma = Threshold::Rate(0.005).resolve(&db).unwrap();
    let mut group = c.benchmark_group("variants");
    group.sample_size(10);
    for v in [Variant::Fuim, Variant::Fuim2, Variant::Fuim3] {
        let cfg = MinerConfig::for_variant(v, gamma);
        group.bench_with_input(BenchmarkId::from_parameter(v), &cfg, |b, cfg| {
            b.iter(|| mine(&fdb, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sequential_vs_parallel, variants);
criterion_main!(benches);
