use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fbreg_bench::{problem, TOL};
use fbreg_core::{solve, BoundaryData, EllipticityPair, OperatorSpec};

fn radial_laplace(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_radial_laplace");
    g.sample_size(10);
    for n in [32, 64, 128] {
        let p = problem(OperatorSpec::laplace(), &BoundaryData::Radial { r0: 0.5 }, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| solve(black_box(p), TOL, 1_000_000).unwrap())
        });
    }
    g.finish();
}

fn halfspace_pucci(c: &mut Criterion) {
    let ell = EllipticityPair::new(1.0, 2.0).unwrap();
    let mut g = c.benchmark_group("solve_halfspace_pucci_plus");
    g.sample_size(10);
    for n in [32, 64] {
        let p = problem(
            OperatorSpec::pucci_plus(ell),
            &BoundaryData::Halfspace { gamma: 0.5, angle: 0.0 },
            n,
        );
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| solve(black_box(p), TOL, 1_000_000).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, radial_laplace, halfspace_pucci);
criterion_main!(benches);
