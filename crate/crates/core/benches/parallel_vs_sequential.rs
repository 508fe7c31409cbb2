use alike_core::exactlinalg::{rat, ExactMatrix};
use alike_core::{verify_all, CheckGroup, Execution, HypercubeContext, VerifyOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_all");
    group.sample_size(10);
    for d in [4, 6] {
        let ctx = HypercubeContext::new(d).unwrap();
        for (name, exec) in STRATEGIES {
            let opts = VerifyOptions {
                execution: exec,
                ..VerifyOptions::default()
            }
            .without(&[CheckGroup::Idempotents]);
            group.bench_with_input(BenchmarkId::new(name, d), &opts, |b, opts| {
                b.iter(|| verify_all(&ctx, opts))
            });
        }
    }
    group.finish();
}

fn bench_matmul(c: &mut Criterion) {
    let mut group = c.benchmark_group("matmul_dense");
    group.sample_size(10);
    for n in [64, 128] {
        let m = ExactMatrix::from_dense(
            (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| rat(((r * 31 + c * 17) % 11) as i64 - 5))
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| {
                b.iter(|| m.matmul_with(m, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_verify, bench_matmul);
criterion_main!(benches);
