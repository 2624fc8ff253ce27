use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fbreg_core::props::{catalog, run_property_suite};
use fbreg_core::{gamma_for_direction, project_to_level_set, SymMat};

fn eval(c: &mut Criterion) {
    let m = SymMat::new(0.7, -0.3, 1.9);
    for op in catalog() {
        let name = format!("eval/{:?}", op.kind());
        c.bench_function(&name, |b| b.iter(|| black_box(&op).eval(black_box(&m))));
    }
}

fn level_set(c: &mut Criterion) {
    let ops = catalog();
    let q = SymMat::new(0.2, 0.1, -0.4);
    c.bench_function("project_to_level_set/bellman", |b| {
        b.iter(|| project_to_level_set(black_box(&ops[3]), black_box(&q)))
    });
    c.bench_function("gamma_for_direction/pucci_plus", |b| {
        b.iter(|| gamma_for_direction(black_box(&ops[1]), black_box([0.6, 0.8])))
    });
}

fn suite(c: &mut Criterion) {
    c.bench_function("property_suite/1000", |b| b.iter(|| run_property_suite(black_box(1), 1000)));
}

criterion_group!(benches, eval, level_set, suite);
criterion_main!(benches);
