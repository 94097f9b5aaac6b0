use bakerdim_bench::sampler;
use bakerdim_core::rng::stream;
use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

fn sampling(c: &mut Criterion) {
    let s = sampler();
    let mut g = c.benchmark_group("sampling");
    g.bench_function("single draw", |b| {
        let mut i = 0u64;
        b.iter(|| {
            i += 1;
            black_box(s.sample(7, i))
        })
    });
    g.bench_function("uncoupled draw", |b| {
        let mut rng = stream(7, 0);
        b.iter(|| black_box(s.draw_uncoupled(&mut rng)))
    });
    g.throughput(Throughput::Elements(100_000));
    g.sample_size(10);
    g.bench_function("cloud 1e5", |b| b.iter(|| black_box(s.cloud(7, 100_000))));
    g.finish();
}

criterion_group!(benches, sampling);
criterion_main!(benches);
