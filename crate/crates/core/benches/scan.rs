use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use soslab::verify::{Execution, Harness};
use soslab::RingContext;

fn scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    for (name, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
        let h = Harness { exec, ..Harness::default() };
        for d in [6, 13] {
            let ctx = RingContext::new(d).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("pythagoras/{name}"), d), &ctx, |b, ctx| {
                b.iter(|| h.verify_pythagoras(ctx, 40))
            });
            group.bench_with_input(BenchmarkId::new(format!("m0/{name}"), d), &ctx, |b, ctx| {
                b.iter(|| h.estimate_m0(ctx, 10, 40))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, scans);
criterion_main!(benches);
