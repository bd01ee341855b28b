use std::hint::black_box;

use cavstat::closedform::g2_cf;
use cavstat::lindblad::{build_liouvillian, steady_density};
use cavstat::steady::steady_state;
use cavstat::{assemble_system, solve_steady, ModelParams};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn params(n_bar: f64) -> ModelParams {
    ModelParams::new(5.0, 0.1, 1.0, 0.25, 0.5, n_bar).unwrap()
}

fn hierarchy(c: &mut Criterion) {
    let p = params(1.0);
    let mut group = c.benchmark_group("hierarchy");
    for k in [2, 4, 6] {
        group.bench_with_input(BenchmarkId::new("assemble", k), &k, |b, &k| {
            b.iter(|| assemble_system(k, black_box(&p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("solve", k), &k, |b, &k| {
            b.iter(|| solve_steady(k, black_box(&p)).unwrap())
        });
    }
    group.bench_function("observables_k6", |b| {
        b.iter(|| steady_state(black_box(&p), 3).unwrap())
    });
    group.finish();
}

fn closed_form(c: &mut Criterion) {
    let p = params(0.0);
    c.bench_function("g2_cf", |b| b.iter(|| g2_cf(black_box(&p)).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let p = params(0.0);
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for cutoff in [10, 20] {
        group.bench_with_input(BenchmarkId::new("build", cutoff), &cutoff, |b, &n| {
            b.iter(|| build_liouvillian(black_box(&p), n).unwrap())
        });
        let l = build_liouvillian(&p, cutoff).unwrap();
        group.bench_with_input(BenchmarkId::new("steady_density", cutoff), &l, |b, l| {
            b.iter(|| steady_density(black_box(l)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, hierarchy, closed_form, oracle);
criterion_main!(benches);
