use bakerdim_bench::{params, sampler};
use bakerdim_core::{cos_sin_coupling, lyapunov_numerical};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn lyapunov(c: &mut Criterion) {
    let p = params();
    let g = cos_sin_coupling();
    let start = sampler().sample(3, 0);
    c.bench_function("spectrum 1e4 iterations", |b| {
        b.iter(|| black_box(lyapunov_numerical(&p, &g, start, 10_000, 8).unwrap()))
    });
}

criterion_group!(benches, lyapunov);
criterion_main!(benches);
