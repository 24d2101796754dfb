use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use thue_bench::{bh, shanks};
use thue_core::form_at;
use thue_core::solver::{brute_force_search, pruned_search, SearchBox};

fn forms(c: &mut Criterion) {
    let mut g = c.benchmark_group("form_at");
    let cubic = shanks(1);
    let octic = bh(3, 4, 1);
    for a in [1i64, 8, 32] {
        g.bench_with_input(BenchmarkId::new("shanks_n1", a), &a, |b, &a| {
            b.iter(|| form_at(&cubic, black_box(a)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bh_3_4_1", a), &a, |b, &a| {
            b.iter(|| form_at(&octic, black_box(a)).unwrap())
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let fam = shanks(1);
    for bound in [100u64, 400] {
        let b = SearchBox::new(-2, 2, bound, 10).unwrap();
        g.bench_with_input(BenchmarkId::new("oracle", bound), &b, |bench, b| {
            bench.iter(|| brute_force_search(&fam, b).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("pruned", bound), &b, |bench, b| {
            bench.iter(|| pruned_search(&fam, b).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, forms, search);
criterion_main!(benches);
