//! Finite-difference solver for the obstacle formulation
//! `max(F(D²u) − 1, −u) = 0`, `u ≥ 0` on a uniform square grid.
//!
//! Outer loop: policy iteration. The control at each node is the
//! linearization of `F` at the current discrete Hessian (maximizing Bellman
//! member or Pucci eigenframe weights). Inner loop: projected SOR sweeps for
//! the frozen-control complementarity problem; the per-node update solves the
//! linearized equation for the centre value and projects onto `u ≥ 0`.
//!
//! The outer two rings of nodes carry Dirichlet data and are excluded from
//! the residual, so every updated node has a full nine-point stencil.

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::grid::{Grid2, Node, NodeMask, Point, ScalarField};
use crate::operators::{OperatorKind, OperatorSpec, SymMat};

/// Number of outer node rings clamped to the boundary data.
pub const FROZEN_RINGS: usize = 2;

#[derive(Debug, Clone)]
pub struct ObstacleProblem {
    operator: OperatorSpec,
    boundary: ScalarField,
    /// Bound on `|D²u|` off the positivity set; recorded only.
    k_bound: f64,
}

impl ObstacleProblem {
    /// `boundary` is sampled on the full grid; only its values on the frozen
    /// rings enter the solve.
    pub fn new(operator: OperatorSpec, boundary: ScalarField, k_bound: f64) -> Result<Self, SolveError> {
        let grid = *boundary.grid();
        for node in grid.nodes().filter(|&n| grid.depth(n) < FROZEN_RINGS) {
            let value = boundary.at(node);
            if value < 0.0 {
                return Err(SolveError::InvalidBoundary {
                    i: node.0,
                    j: node.1,
                    value,
                });
            }
        }
        Ok(Self {
            operator,
            boundary,
            k_bound,
        })
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.operator
    }

    pub fn grid(&self) -> &Grid2 {
        self.boundary.grid()
    }

    pub fn boundary(&self) -> &ScalarField {
        &self.boundary
    }

    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    /// Cap on projected SOR sweeps.
    pub max_iters: usize,
    /// Relaxation factor; `None` picks the optimal Poisson value for the grid.
    pub omega: Option<f64>,
    pub max_policy_iters: usize,
}

impl SolverOptions {
    pub fn new(tol: f64, max_iters: usize) -> Self {
        Self {
            tol,
            max_iters,
            omega: None,
            max_policy_iters: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: ScalarField,
    /// Discrete positivity set `{u > activation_threshold}`.
    pub active_mask: NodeMask,
    pub activation_threshold: f64,
    /// Projected SOR sweeps performed.
    pub iterations: usize,
    pub policy_iterations: usize,
    pub residual: f64,
}

impl Solution {
    /// Builds a solution record from a field, with threshold `h²`.
    pub fn from_field(u: ScalarField, iterations: usize, residual: f64) -> Self {
        let threshold = u.grid().h().powi(2);
        let active_mask = active_mask(&u, threshold);
        Self {
            u,
            active_mask,
            activation_threshold: threshold,
            iterations,
            policy_iterations: 0,
            residual,
        }
    }

    pub fn grid(&self) -> &Grid2 {
        self.u.grid()
    }
}

pub fn active_mask(u: &ScalarField, threshold: f64) -> NodeMask {
    let values = u.values().iter().map(|&v| v > threshold).collect();
    NodeMask::from_values(*u.grid(), values).expect("same grid")
}

fn is_free(grid: &Grid2, node: Node) -> bool {
    grid.depth(node) >= FROZEN_RINGS
}

/// `max(F_h(u) − 1, −u)` at one free node.
fn complementarity(op: &OperatorSpec, u: &ScalarField, node: Node) -> f64 {
    let f = op.eval(&u.hessian_unchecked(node));
    (f - 1.0).max(-u.at(node))
}

/// Max over free nodes of `|max(F_h(u) − 1, −u)|`.
pub fn residual(problem: &ObstacleProblem, u: &ScalarField) -> Result<f64, crate::error::GridError> {
    if u.grid() != problem.grid() {
        return Err(crate::error::GridError::GridMismatch);
    }
    Ok(residual_unchecked(&problem.operator, u))
}

fn residual_unchecked(op: &OperatorSpec, u: &ScalarField) -> f64 {
    let grid = *u.grid();
    grid.nodes()
        .filter(|&n| is_free(&grid, n))
        .map(|n| complementarity(op, u, n).abs())
        .fold(0.0, f64::max)
}

/// Solves the obstacle problem to complementarity residual `tol`.
pub fn solve(problem: &ObstacleProblem, tol: f64, max_iters: usize) -> Result<Solution, SolveError> {
    solve_with(problem, &SolverOptions::new(tol, max_iters))
}

struct Sweeper<'a> {
    grid: Grid2,
    h2: f64,
    omega: f64,
    laplace: bool,
    controls: &'a [SymMat],
}

impl Sweeper<'_> {
    /// One lexicographic projected SOR sweep; returns the largest update.
    fn sweep(&self, u: &mut [f64], project: bool, rhs: f64) -> f64 {
        let side = self.grid.nodes_per_side();
        let n = self.grid.n_cells();
        let mut max_change = 0.0_f64;
        for j in FROZEN_RINGS..=n - FROZEN_RINGS {
            for i in FROZEN_RINGS..=n - FROZEN_RINGS {
                let k = j * side + i;
                let ex = u[k + 1] + u[k - 1];
                let ey = u[k + side] + u[k - side];
                let target = if self.laplace {
                    // (ex + ey − 4t)/h² = rhs
                    (ex + ey - rhs * self.h2) * 0.25
                } else {
                    let a = &self.controls[k];
                    let cross = (u[k + side + 1] - u[k - side + 1] - u[k + side - 1] + u[k - side - 1]) * 0.25;
                    // trace(A M) with the centre value removed, times h²
                    let lin = a.a11 * ex + 2.0 * a.a12 * cross + a.a22 * ey;
                    (lin - rhs * self.h2) / (2.0 * (a.a11 + a.a22))
                };
                let old = u[k];
                let mut new = old + self.omega * (target - old);
                if project && new < 0.0 {
                    new = 0.0;
                }
                u[k] = new;
                max_change = max_change.max((new - old).abs());
            }
        }
        max_change
    }
}

/// Solves with explicit options.
pub fn solve_with(problem: &ObstacleProblem, opts: &SolverOptions) -> Result<Solution, SolveError> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(SolveError::InvalidTolerance(opts.tol));
    }
    let grid = *problem.grid();
    let op = &problem.operator;
    let h = grid.h();
    let h2 = h * h;
    let omega = opts
        .omega
        .unwrap_or_else(|| 2.0 / (1.0 + (std::f64::consts::PI / grid.n_cells() as f64).sin()));
    let laplace = op.kind() == OperatorKind::Laplace;

    // frozen rings from the data, interior from a harmonic extension
    let mut u = problem.boundary.clone();
    for node in grid.nodes().filter(|&n| is_free(&grid, n)) {
        let k = grid.index(node);
        u.values_mut()[k] = 0.0;
    }
    let identity = vec![SymMat::identity(2); if laplace { 0 } else { grid.len() }];
    {
        let harmonic = Sweeper {
            grid,
            h2,
            omega,
            laplace: true,
            controls: &[],
        };
        let scale = problem.boundary.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let init_tol = 1e-6 * scale.max(h2);
        for _ in 0..opts.max_iters.max(1) {
            if harmonic.sweep(u.values_mut(), false, 0.0) <= init_tol {
                break;
            }
        }
        for v in u.values_mut() {
            *v = v.max(0.0);
        }
    }

    let ell = op.ellipticity();
    // an update of δ at a node moves its residual by about 2 n λ₁ δ / h²
    let mut inner_tol = 0.25 * opts.tol * h2 / (4.0 * ell.lambda1());
    let mut controls = identity;
    // policy split: PDE rows where u > 0, obstacle rows where the projection bit
    let mut policy = active_mask(&u, 0.0);
    let mut sweeps = 0;
    let mut best: Option<(f64, ScalarField)> = None;

    for policy_iter in 1..=opts.max_policy_iters {
        let mut controls_changed = false;
        if !laplace {
            for node in grid.nodes().filter(|&n| is_free(&grid, n)) {
                let k = grid.index(node);
                let a = op.linearization(&u.hessian_unchecked(node));
                if a != controls[k] {
                    controls_changed = true;
                    controls[k] = a;
                }
            }
        }
        let sweeper = Sweeper {
            grid,
            h2,
            omega,
            laplace,
            controls: &controls,
        };
        while sweeps < opts.max_iters {
            sweeps += 1;
            if sweeper.sweep(u.values_mut(), true, 1.0) <= inner_tol {
                break;
            }
        }
        let res = residual_unchecked(op, &u);
        // the h² mask is not used here: nodes sitting on the threshold flicker
        let new_policy = active_mask(&u, 0.0);
        let policy_stable = new_policy == policy;
        policy = new_policy;
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, u.clone()));
        }
        // Pucci eigenframes move continuously with u, so control identity is
        // not required once the nonlinear residual is met
        if res <= opts.tol && policy_stable {
            let mut sol = Solution::from_field(u, sweeps, res);
            sol.policy_iterations = policy_iter;
            return Ok(sol);
        }
        if sweeps >= opts.max_iters {
            break;
        }
        if res > opts.tol && !controls_changed {
            inner_tol *= 0.25;
        }
    }

    let (res, u) = best.expect("at least one policy iteration");
    let mut sol = Solution::from_field(u, sweeps, res);
    sol.policy_iterations = opts.max_policy_iters;
    Err(SolveError::NonConvergence { best: Box::new(sol) })
}

/// Midpoints of grid edges whose endpoints differ in `active_mask`.
pub fn extract_free_boundary(sol: &Solution) -> Vec<Point> {
    boundary_edges(&sol.active_mask)
        .into_iter()
        .map(|(a, b)| {
            let (pa, pb) = (sol.grid().point(a), sol.grid().point(b));
            [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
        })
        .collect()
}

fn boundary_edges(mask: &NodeMask) -> Vec<(Node, Node)> {
    let grid = *mask.grid();
    let n = grid.n_cells();
    let mut edges = Vec::new();
    for (i, j) in grid.nodes() {
        let here = mask.at((i, j));
        if i < n && mask.at((i + 1, j)) != here {
            edges.push(((i, j), (i + 1, j)));
        }
        if j < n && mask.at((i, j + 1)) != here {
            edges.push(((i, j), (i, j + 1)));
        }
    }
    edges
}

/// Free-boundary edge midpoints snapped to their active endpoint, deduplicated, row-major.
pub fn free_boundary_nodes(sol: &Solution) -> Vec<Node> {
    let grid = *sol.grid();
    let mut seen = vec![false; grid.len()];
    for (a, b) in boundary_edges(&sol.active_mask) {
        let node = if sol.active_mask.at(a) { a } else { b };
        seen[grid.index(node)] = true;
    }
    seen.iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(k, _)| grid.node_of(k))
        .collect()
}
