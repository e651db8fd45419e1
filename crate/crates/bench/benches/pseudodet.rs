use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ordeig::pseudodet::det_signed_log;
use ordeig::{pseudo_det, pseudo_det_grouped, GroupedPermutationPlan, SignedLog};
use ordeig_bench::{layered_tensor, single_layout};

fn naive_vs_grouped(c: &mut Criterion) {
    let mut group = c.benchmark_group("pseudo_det");
    for n in [4usize, 5, 6, 7] {
        let sizes = single_layout(n, n.div_ceil(2));
        let t = layered_tensor(n, &sizes);
        let plan = GroupedPermutationPlan::new(sizes, n).unwrap();
        group.bench_with_input(BenchmarkId::new("naive", n), &t, |b, t| {
            b.iter(|| pseudo_det(black_box(t)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("grouped", n), &t, |b, t| {
            b.iter(|| pseudo_det_grouped(black_box(t), &plan).unwrap())
        });
    }
    group.finish();
}

fn determinant(c: &mut Criterion) {
    let mut group = c.benchmark_group("det_signed_log");
    for n in [4usize, 6, 8] {
        let rows: Vec<Vec<SignedLog>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| SignedLog::from_f64((i as f64 * 1.7 + j as f64).cos() + 0.05))
                    .collect()
            })
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &rows, |b, rows| {
            b.iter(|| det_signed_log(black_box(rows)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, naive_vs_grouped, determinant);
criterion_main!(benches);
