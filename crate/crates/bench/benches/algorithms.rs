use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use psp_bench::{bits, graph, linear, rng};
use psp_core::psp::{compute, Algorithm};
use psp_core::Oracle;

fn order(o: &dyn Oracle) -> Vec<usize> {
    (0..o.size()).collect()
}

fn algorithms(c: &mut Criterion) {
    let mut group = c.benchmark_group("bits");
    for n in [4usize, 6, 8] {
        let o = bits(&mut rng(n as u64), n);
        for alg in Algorithm::ALL {
            if alg == Algorithm::Brute && n > 6 {
                continue;
            }
            group.bench_with_input(BenchmarkId::new(alg.name(), n), &o, |b, o| {
                b.iter(|| compute(alg, o, &order(o)).unwrap())
            });
        }
    }
    group.finish();
}

fn scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("par");
    group.sample_size(10);
    for n in [8usize, 12, 16] {
        let o = graph(&mut rng(n as u64), n);
        group.bench_with_input(BenchmarkId::new("graph", n), &o, |b, o| {
            b.iter(|| compute(Algorithm::Par, o, &order(o)).unwrap())
        });
        let o = linear(&mut rng(n as u64), n);
        group.bench_with_input(BenchmarkId::new("gf2", n), &o, |b, o| {
            b.iter(|| compute(Algorithm::Par, o, &order(o)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, algorithms, scaling);
criterion_main!(benches);
