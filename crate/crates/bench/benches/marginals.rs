use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ordeig::oracle::sample;
use ordeig::{EigenDistribution, EnsembleModel};
use ordeig_bench::FIGURE_MODELS;

fn pdf_single(c: &mut Criterion) {
    let mut group = c.benchmark_group("pdf_single");
    for spec in FIGURE_MODELS {
        let d = EigenDistribution::new(&spec.parse().unwrap()).unwrap();
        let l = d.m().div_ceil(2);
        let x = d.expect_single(l, &ordeig::ScalarFn::Power(1)).unwrap();
        group.bench_function(BenchmarkId::new(spec, l), |b| {
            b.iter(|| d.pdf_single(l, black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn cdf_and_box(c: &mut Criterion) {
    let d = EigenDistribution::new(&"uncorrelated-wishart M=4 n=5".parse().unwrap()).unwrap();
    c.bench_function("cdf_single M=4", |b| {
        b.iter(|| d.cdf_single(1, black_box(12.0)).unwrap())
    });
    c.bench_function("prob_all_in M=4", |b| {
        b.iter(|| d.prob_all_in(black_box(0.5), 20.0).unwrap())
    });
    let corr = EigenDistribution::new(
        &"correlated-wishart p=3 n=6 phi=3,1.5,1 mult=2,2,2"
            .parse()
            .unwrap(),
    )
    .unwrap();
    c.bench_function("prob_all_in correlated N=6", |b| {
        b.iter(|| corr.prob_all_in(black_box(0.1), 8.0).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_10k");
    group.sample_size(10);
    for spec in [
        "uncorrelated-wishart M=4 n=5",
        "gue M=6",
        "beta M=3 m=1 n=2",
    ] {
        let model: EnsembleModel = spec.parse().unwrap();
        group.bench_function(spec, |b| {
            b.iter(|| sample(&model, 10_000, black_box(1)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pdf_single, cdf_and_box, monte_carlo);
criterion_main!(benches);
