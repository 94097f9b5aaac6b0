use bakerdim_bench::cloud;
use bakerdim_core::dimension::{box_count, pair_counts, PairOptions};
use bakerdim_core::ScaleWindow;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn pairs(c: &mut Criterion) {
    let mut g = c.benchmark_group("pair counts");
    g.sample_size(10);
    let scales = ScaleWindow::dyadic(5, 11).unwrap().scales(2);
    for n in [10_000, 100_000] {
        let cloud = cloud(n);
        g.bench_with_input(BenchmarkId::new("window 5..11", n), &cloud, |b, cloud| {
            b.iter(|| black_box(pair_counts(cloud, &scales, &PairOptions::default()).unwrap()))
        });
    }
    g.finish();

    let cloud = cloud(100_000);
    c.bench_function("box count 2^-6, 1e5 points", |b| b.iter(|| black_box(box_count(&cloud, 2f64.powi(-6)).unwrap())));
}

criterion_group!(benches, pairs);
criterion_main!(benches);
