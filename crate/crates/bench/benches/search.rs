use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use expramsey::PatternSpec;
use expramsey_bench::{run_pattern_number, run_search, run_triple, search_cases};

fn avoider_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    for case in search_cases() {
        for jobs in [1, 4] {
            g.bench_function(format!("{}/jobs{jobs}", case.name), |b| b.iter(|| run_search(black_box(&case), jobs)));
        }
    }
    g.finish();
}

fn pattern_numbers(c: &mut Criterion) {
    let mut g = c.benchmark_group("pattern_number");
    g.sample_size(10);
    g.bench_function("schur_r2", |b| b.iter(|| run_pattern_number(2, &PatternSpec::schur(), 10)));
    g.bench_function("brauer1_r2", |b| b.iter(|| run_pattern_number(2, &PatternSpec::brauer(1), 10)));
    g.bench_function("exp2_r2", |b| b.iter(|| run_pattern_number(2, &PatternSpec::exp_two_triple(), 20)));
    g.finish();
}

fn extraction(c: &mut Criterion) {
    let mut g = c.benchmark_group("extract");
    g.sample_size(10);
    for m in [3, 9] {
        g.bench_function(format!("triple_mod{m}"), |b| b.iter(|| run_triple(black_box(m))));
    }
    g.finish();
}

criterion_group!(benches, avoider_search, pattern_numbers, extraction);
criterion_main!(benches);
