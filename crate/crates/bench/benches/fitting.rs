use bn_bench::fixture_sample;
use bn_core::fit::{fisher_info_alpha, mle_fixed_point, mle_newton, profile_alpha_mle, FitConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("fit");
    for n in [75usize, 600, 10_000] {
        let data = fixture_sample(3.0, n, 11);
        g.bench_with_input(BenchmarkId::new("newton", n), &data, |b, d| {
            b.iter(|| mle_newton(d, &FitConfig::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("fixed_point", n), &data, |b, d| {
            b.iter(|| mle_fixed_point(d, &FitConfig::default()).unwrap())
        });
    }
    let data = fixture_sample(2.0, 600, 12);
    g.bench_function("profile_alpha_600", |b| b.iter(|| profile_alpha_mle(&data, 0.5, 1.0).unwrap()));
    g.finish();
}

fn information(c: &mut Criterion) {
    c.bench_function("fisher_info_alpha_2", |b| b.iter(|| fisher_info_alpha(std::hint::black_box(2.0))));
    c.bench_function("fisher_info_alpha_5", |b| b.iter(|| fisher_info_alpha(std::hint::black_box(5.0))));
}

criterion_group!(benches, solvers, information);
criterion_main!(benches);
