//! Uniform node grids on `[-L, L]²` and fields living on them.

use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::operators::SymMat;

pub type Point = [f64; 2];

/// Node `(i, j)` sits at `(-L + i h, -L + j h)`.
pub type Node = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct Grid2 {
    half_width: f64,
    n_cells: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    half_width: f64,
    n_cells: usize,
}

impl TryFrom<RawGrid> for Grid2 {
    type Error = GridError;
    fn try_from(raw: RawGrid) -> Result<Self, GridError> {
        Grid2::new(raw.half_width, raw.n_cells)
    }
}

impl Grid2 {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self, GridError> {
        if n_cells < 8 || !n_cells.is_multiple_of(2) || !(half_width > 0.0 && half_width.is_finite()) {
            return Err(GridError::InvalidGrid {
                n_cells,
                half_width,
            });
        }
        Ok(Self {
            half_width,
            n_cells,
        })
    }

    /// Grid on `[-L, L]²` with the spacing closest to `h`.
    pub fn with_spacing(half_width: f64, h: f64) -> Result<Self, GridError> {
        let n = (2.0 * half_width / h).round() as usize;
        Self::new(half_width, n)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n_cells as f64
    }

    pub fn nodes_per_side(&self) -> usize {
        self.n_cells + 1
    }

    pub fn len(&self) -> usize {
        self.nodes_per_side() * self.nodes_per_side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major (`j` outer, `i` inner) linear index.
    pub fn index(&self, (i, j): Node) -> usize {
        j * self.nodes_per_side() + i
    }

    pub fn node_of(&self, index: usize) -> Node {
        (index % self.nodes_per_side(), index / self.nodes_per_side())
    }

    pub fn coord(&self, k: usize) -> f64 {
        // symmetric formula keeps the origin and the far edge exact
        let n = self.n_cells as f64;
        self.half_width * (2.0 * k as f64 - n) / n
    }

    pub fn point(&self, (i, j): Node) -> Point {
        [self.coord(i), self.coord(j)]
    }

    /// The origin node.
    pub fn center(&self) -> Node {
        (self.n_cells / 2, self.n_cells / 2)
    }

    /// Nearest node, clamped to the grid.
    pub fn nearest_node(&self, p: Point) -> Node {
        let snap = |x: f64| {
            let k = ((x + self.half_width) / self.h()).round();
            k.clamp(0.0, self.n_cells as f64) as usize
        };
        (snap(p[0]), snap(p[1]))
    }

    /// Distance (in nodes) from `node` to the nearest grid edge.
    pub fn depth(&self, (i, j): Node) -> usize {
        i.min(j).min(self.n_cells - i).min(self.n_cells - j)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        let side = self.nodes_per_side();
        (0..side).flat_map(move |j| (0..side).map(move |i| (i, j)))
    }

    /// Nodes with `|x - center| <= radius`, row-major.
    pub fn nodes_in_ball(&self, center: Point, radius: f64) -> Vec<Node> {
        let h = self.h();
        let lo = |c: f64| (((c - radius + self.half_width) / h).floor().max(0.0)) as usize;
        let hi = |c: f64| {
            (((c + radius + self.half_width) / h).ceil() as usize).min(self.n_cells)
        };
        let r2 = radius * radius * (1.0 + 1e-12);
        let mut out = Vec::new();
        for j in lo(center[1])..=hi(center[1]) {
            for i in lo(center[0])..=hi(center[0]) {
                let p = self.point((i, j));
                let d2 = (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2);
                if d2 <= r2 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether `B_radius(center)` lies inside `[-L + margin, L - margin]²`.
    pub fn ball_fits(&self, center: Point, radius: f64, margin: f64) -> bool {
        let lim = self.half_width - margin + 1e-12;
        center[0].abs() + radius <= lim && center[1].abs() + radius <= lim
    }

    pub fn check_ball(&self, center: Point, radius: f64, margin: f64) -> Result<(), GridError> {
        if self.ball_fits(center, radius, margin) {
            Ok(())
        } else {
            Err(GridError::RadiusTooLarge {
                x: center[0],
                y: center[1],
                radius,
            })
        }
    }
}

/// Real values at every node of a [`Grid2`].
#[derive(Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2, f: impl Fn(Point) -> f64) -> Self {
        let values = grid.nodes().map(|n| f(grid.point(n))).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Grid2, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (i, j) = grid.node_of(k);
            return Err(GridError::NonFinite { i, j });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, node: Node) -> f64 {
        self.values[self.grid.index(node)]
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn require_stencil(&self, (i, j): Node) -> Result<(), GridError> {
        let n = self.grid.n_cells;
        if i == 0 || j == 0 || i >= n || j >= n {
            return Err(GridError::BoundaryNode { i, j });
        }
        Ok(())
    }

    /// Nine-point discrete Hessian; exact on quadratic polynomials.
    pub fn hessian(&self, node: Node) -> Result<SymMat, GridError> {
        self.require_stencil(node)?;
        Ok(self.hessian_unchecked(node))
    }

    pub(crate) fn hessian_unchecked(&self, (i, j): Node) -> SymMat {
        let h2 = self.grid.h() * self.grid.h();
        let u = |a: usize, b: usize| self.values[self.grid.index((a, b))];
        let c = u(i, j);
        let a11 = (u(i + 1, j) + u(i - 1, j) - 2.0 * c) / h2;
        let a22 = (u(i, j + 1) + u(i, j - 1) - 2.0 * c) / h2;
        let a12 = (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1))
            / (4.0 * h2);
        SymMat::new(a11, a12, a22)
    }

    /// Central-difference gradient.
    pub fn gradient(&self, node: Node) -> Result<[f64; 2], GridError> {
        self.require_stencil(node)?;
        let (i, j) = node;
        let h = self.grid.h();
        let u = |a: usize, b: usize| self.values[self.grid.index((a, b))];
        Ok([
            (u(i + 1, j) - u(i - 1, j)) / (2.0 * h),
            (u(i, j + 1) - u(i, j - 1)) / (2.0 * h),
        ])
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn bilinear(&self, p: Point) -> Option<f64> {
        let g = &self.grid;
        let h = g.h();
        let s = (p[0] + g.half_width) / h;
        let t = (p[1] + g.half_width) / h;
        let n = g.n_cells as f64;
        let eps = 1e-9;
        if !(s >= -eps && t >= -eps && s <= n + eps && t <= n + eps) {
            return None;
        }
        let s = s.clamp(0.0, n);
        let t = t.clamp(0.0, n);
        let i = (s.floor() as usize).min(g.n_cells - 1);
        let j = (t.floor() as usize).min(g.n_cells - 1);
        let fs = s - i as f64;
        let ft = t - j as f64;
        let u = |a: usize, b: usize| self.values[g.index((a, b))];
        Some(
            (1.0 - fs) * (1.0 - ft) * u(i, j)
                + fs * (1.0 - ft) * u(i + 1, j)
                + (1.0 - fs) * ft * u(i, j + 1)
                + fs * ft * u(i + 1, j + 1),
        )
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("min", &lo)
            .field("max", &hi)
            .finish()
    }
}

/// Nine-point discrete Hessian of `u` at `node`.
pub fn discrete_hessian(u: &ScalarField, node: Node) -> Result<SymMat, GridError> {
    u.hessian(node)
}

/// A boolean per node; used for the discrete positivity set.
#[derive(Clone, PartialEq)]
pub struct NodeMask {
    grid: Grid2,
    values: Vec<bool>,
}

impl NodeMask {
    pub fn from_fn(grid: Grid2, f: impl Fn(Point) -> bool) -> Self {
        let values = grid.nodes().map(|n| f(grid.point(n))).collect();
        Self { grid, values }
    }

    pub fn from_values(grid: Grid2, values: Vec<bool>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn at(&self, node: Node) -> bool {
        self.values[self.grid.index(node)]
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }
}

impl std::fmt::Debug for NodeMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NodeMask")
            .field("grid", &self.grid)
            .field("set", &self.count())
            .finish()
    }
}
