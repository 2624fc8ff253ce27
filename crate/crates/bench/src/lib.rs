//! Shared fixtures for the benchmarks.

use fbreg_core::{solve, BoundaryData, Grid2, ObstacleProblem, OperatorSpec, Solution};

pub const TOL: f64 = 1e-8;

pub fn problem(operator: OperatorSpec, data: &BoundaryData, n_cells: usize) -> ObstacleProblem {
    let grid = Grid2::new(1.0, n_cells).expect("valid grid");
    ObstacleProblem::new(operator, data.field(grid).expect("synthetic data"), 0.0).expect("non-negative data")
}

/// The Laplace radial run with contact radius 1/2.
pub fn radial_solution(n_cells: usize) -> Solution {
    let p = problem(OperatorSpec::laplace(), &BoundaryData::Radial { r0: 0.5 }, n_cells);
    solve(&p, TOL, 1_000_000).expect("radial run converges")
}
