use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperdev_core::montecarlo::StreamFactory;
use hyperdev_core::process::{decompose, sample_prefix, CondMeanMode, DegreeProcess};
use hyperdev_core::gen_ap;
use num_rational::BigRational;

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    group.sample_size(20);
    let n = 200;
    let h = gen_ap(n, 3).unwrap();
    let prefix = sample_prefix(n, 60, &mut StreamFactory::new(3).stream(0)).unwrap();
    for (label, mode) in [("incremental", CondMeanMode::Incremental), ("naive", CondMeanMode::Naive)] {
        group.bench_with_input(BenchmarkId::new("f64", label), &mode, |b, &mode| {
            b.iter(|| decompose::<f64>(&h, &prefix, mode).unwrap())
        });
    }
    let small = gen_ap(40, 3).unwrap();
    let small_prefix = sample_prefix(40, 12, &mut StreamFactory::new(4).stream(0)).unwrap();
    group.bench_function("exact/40", |b| {
        b.iter(|| decompose::<BigRational>(&small, &small_prefix, CondMeanMode::Incremental).unwrap())
    });
    group.finish();

    let n = 1000;
    let process = DegreeProcess::new(&gen_ap(n, 3).unwrap());
    let prefix = sample_prefix(n, 300, &mut StreamFactory::new(5).stream(0)).unwrap();
    c.bench_function("lambda_trace/1000", |b| b.iter(|| process.trace(&prefix).unwrap()));
}

criterion_group!(benches, decomposition);
criterion_main!(benches);
