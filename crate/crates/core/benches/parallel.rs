use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mlcoh::decide::random_rewrites;
use mlcoh::gen::Generator;
use mlcoh::par::{decide_batch, Exec};
use mlcoh::schemas::{axiom_schemas, instantiate};
use mlcoh::{decide_eq, SystemId};

fn pairs(n: u64) -> Vec<(mlcoh::Arrow, mlcoh::Arrow)> {
    (0..n)
        .map(|seed| {
            let mut g = Generator::new(SystemId::QmpnNeg, seed);
            let f = g.arrow(12);
            let (h, _) = random_rewrites(&f, 6, &mut g);
            (f, h)
        })
        .collect()
}

fn suite(exec: Exec, count: u64) -> usize {
    let sys = SystemId::QmpnNeg;
    exec.map(axiom_schemas(sys), |s| {
        (0..count)
            .filter(|&seed| {
                let mut g = Generator::new(sys, seed).with_max_size(12);
                instantiate(s, &mut g)
                    .is_some_and(|i| decide_eq(&i.lhs, &i.rhs, sys).is_ok_and(|v| v.is_equal()))
            })
            .count()
    })
    .into_iter()
    .sum()
}

fn bench(c: &mut Criterion) {
    let batch = pairs(400);
    let mut group = c.benchmark_group("batch decide");
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &e| b.iter(|| decide_batch(e, batch.clone(), SystemId::QmpnNeg)),
        );
    }
    group.finish();

    let mut group = c.benchmark_group("selftest");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &e| b.iter(|| suite(e, 10)),
        );
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
