use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncd_bench::fixture_samples;
use ncd_core::{
    distance_matrix, CompressorHandle, CompressorKind, LengthCache, MetricSpec,
    SymmetrisationPolicy,
};

fn single_compression(c: &mut Criterion) {
    let text = fixture_samples(1)[0].text.clone();
    let mut g = c.benchmark_group("compress_len");
    for kind in CompressorKind::ALL {
        let h = CompressorHandle::pinned(kind);
        g.bench_function(kind.to_string(), |b| {
            b.iter(|| h.compress_len(&[text.as_bytes()]).unwrap())
        });
    }
    g.finish();
}

fn self_matrix(c: &mut Criterion) {
    let samples = fixture_samples(60);
    let metric = MetricSpec::ncd(CompressorHandle::gzip());
    let mut g = c.benchmark_group("self_matrix_gzip_60");
    g.sample_size(10);
    for policy in SymmetrisationPolicy::ALL {
        g.bench_with_input(BenchmarkId::from_parameter(policy), &policy, |b, &p| {
            b.iter(|| distance_matrix(&samples, &samples, &metric, p, &LengthCache::new()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, single_compression, self_matrix);
criterion_main!(benches);
