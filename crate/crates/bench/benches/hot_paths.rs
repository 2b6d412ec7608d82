use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdgen_core::evolve::{run, EvolverConfig};
use qdgen_core::solvers::{insertion_tour, DistanceMatrix, InsertionRule, ObjectiveSpec};
use qdgen_core::{mutate, rue_instance, FeatureSet, Instance, OperatorSuite, TourRatio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(n: usize) -> Instance {
    rue_instance(n, &mut ChaCha8Rng::seed_from_u64(n as u64)).unwrap()
}

fn features(c: &mut Criterion) {
    let mut group = c.benchmark_group("features");
    for n in [50, 100, 200] {
        let inst = instance(n);
        for fs in [FeatureSet::fc1(), FeatureSet::fc2()] {
            group.bench_with_input(BenchmarkId::new(fs.id.clone(), n), &inst, |b, inst| {
                b.iter(|| fs.evaluate(black_box(inst)).unwrap())
            });
        }
    }
    group.finish();
}

fn insertion(c: &mut Criterion) {
    let mut group = c.benchmark_group("insertion");
    for n in [50, 100, 200] {
        let inst = instance(n);
        let dm = DistanceMatrix::new(inst.points());
        for (name, rule) in [("FI", InsertionRule::Farthest), ("NI", InsertionRule::Nearest)] {
            group.bench_with_input(BenchmarkId::new(name, n), &dm, |b, dm| {
                b.iter(|| insertion_tour(black_box(dm), 0, rule).length)
            });
        }
    }
    let ratio = TourRatio::from_spec(&ObjectiveSpec::fi_vs_ni()).unwrap();
    let inst = instance(100);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    group.bench_function("objective/100", |b| b.iter(|| ratio.evaluate_detailed(black_box(&inst), &mut rng).ratio));
    group.finish();
}

fn mutation(c: &mut Criterion) {
    let inst = instance(100);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for suite in [OperatorSuite::simple(), OperatorSuite::all()] {
        c.bench_function(&format!("mutate/{}", suite.id()), |b| {
            b.iter(|| mutate(black_box(&inst), &suite, &mut rng))
        });
    }
}

fn qd_iterations(c: &mut Criterion) {
    let mut group = c.benchmark_group("qd");
    group.sample_size(10);
    group.bench_function("100 iterations n=100", |b| {
        b.iter(|| run(&EvolverConfig::qd(100, 3).with_n(100)).unwrap().archive.len())
    });
    group.finish();
}

criterion_group!(benches, features, insertion, mutation, qd_iterations);
criterion_main!(benches);
