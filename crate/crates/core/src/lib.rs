//! Solver and regularity harness for the obstacle-type free boundary problem
//! `F(D²u) = 1` in `{u > 0}`, `u ≥ 0`, with `F` a uniformly elliptic convex or
//! concave operator from a closed catalog.
//!
//! - [`operators`]: the catalog, Pucci extremal operators and the two
//!   algebraic solves on `{F = 1}`.
//! - [`solver`]: policy iteration with projected SOR sweeps on a square grid.
//! - [`harness`]: quadratic models, growth, non-degeneracy, thickness,
//!   blow-ups and monotonicity checks on discrete solutions.
//! - [`counterexample`]: the exact 1-D construction where non-degeneracy fails.

pub mod boundary;
pub mod counterexample;
pub mod error;
pub mod grid;
pub mod harness;
pub mod operators;
pub mod props;
pub mod snapshot;
pub mod solver;

pub use boundary::{radial_oracle, BoundaryData};
pub use error::{FamilyError, GridError, HarnessError, OperatorError, SnapshotError, SolveError};
pub use grid::{discrete_hessian, Grid2, Node, NodeMask, Point, ScalarField};
pub use operators::{
    eval_operator, gamma_for_direction, project_to_level_set, pucci_minus, pucci_plus,
    EllipticityPair, OperatorKind, OperatorSpec, SymMat,
};
pub use solver::{
    extract_free_boundary, free_boundary_nodes, residual, solve, solve_with, ObstacleProblem,
    Solution, SolverOptions,
};
