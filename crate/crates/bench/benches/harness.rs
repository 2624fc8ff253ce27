use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fbreg_bench::radial_solution;
use fbreg_core::free_boundary_nodes;
use fbreg_core::harness::{dyadic_projection_track, halfspace_fit, min_diameter, nondegeneracy_check, rescale};
use fbreg_core::{EllipticityPair, OperatorSpec};

fn checks(c: &mut Criterion) {
    let sol = radial_solution(128);
    let grid = *sol.grid();
    let x = [0.5, 0.0];
    let spec = OperatorSpec::laplace();
    let node = grid.nearest_node(x);
    c.bench_function("nondegeneracy/free_boundary", |b| {
        let pts: Vec<_> = free_boundary_nodes(&sol).into_iter().map(|n| grid.point(n)).collect();
        b.iter(|| {
            for p in &pts {
                black_box(nondegeneracy_check(&sol.u, *p, &[0.25, 0.125], 1.0).unwrap());
            }
        })
    });
    c.bench_function("dyadic_projection_track", |b| {
        b.iter(|| dyadic_projection_track(&spec, black_box(&sol.u), node, 0.25).unwrap())
    });
    c.bench_function("min_diameter/128_dirs", |b| {
        b.iter(|| min_diameter(black_box(&sol.active_mask), x, 0.25, 128).unwrap())
    });
    let blow = rescale(&sol.u, x, 0.25, 64).unwrap();
    c.bench_function("halfspace_fit/64", |b| {
        b.iter(|| halfspace_fit(black_box(&blow), &EllipticityPair::unit()))
    });
}

criterion_group!(benches, checks);
criterion_main!(benches);
