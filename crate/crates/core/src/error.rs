use thiserror::Error;

use crate::solver::Solution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("ellipticity constants must satisfy 0 < lambda0 <= lambda1 (got {lambda0}, {lambda1})")]
    InvalidEllipticity { lambda0: f64, lambda1: f64 },
    #[error("Laplace requires lambda0 <= 1 <= lambda1 (got {lambda0}, {lambda1})")]
    LaplaceEllipticity { lambda0: f64, lambda1: f64 },
    #[error("Bellman family is empty")]
    EmptyFamily,
    #[error("only bellman_family operators take a family")]
    UnexpectedFamily,
    #[error("family member {index} has spectrum [{lo}, {hi}] outside the ellipticity range")]
    MemberOutOfRange { index: usize, lo: f64, hi: f64 },
    #[error("direction is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },
    #[error("bracket does not straddle 1: F(lo)={lo}, F(hi)={hi}")]
    NoBracket { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs an even cell count >= 8 and positive half-width (got n_cells={n_cells}, half_width={half_width})")]
    InvalidGrid { n_cells: usize, half_width: f64 },
    #[error("field has {got} values but grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field is not finite at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("grid mismatch between field and problem")]
    GridMismatch,
    #[error("node ({i}, {j}) lacks a full 9-point neighbourhood")]
    BoundaryNode { i: usize, j: usize },
    #[error("ball of radius {radius} around ({x}, {y}) does not fit inside the grid")]
    RadiusTooLarge { x: f64, y: f64, radius: f64 },
    #[error("radius {r} is below the resolvable scale {min}")]
    RadiusTooSmall { r: f64, min: f64 },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("boundary value {value} < 0 at node ({i}, {j})")]
    InvalidBoundary { i: usize, j: usize, value: f64 },
    #[error("tolerance must be positive (got {0})")]
    InvalidTolerance(f64),
    #[error("no convergence after {} sweeps (residual {})", .best.iterations, .best.residual)]
    NonConvergence { best: Box<Solution> },
}

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("unrecognized boundary descriptor `{0}`")]
    Unrecognized(String),
    #[error("bad parameter in `{descriptor}`: {reason}")]
    BadParameter { descriptor: String, reason: String },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("snapshot schema: {0}")]
    Schema(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("only {0} dyadic level(s) available, need at least 2")]
    TooFewLevels(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("interval {0} must satisfy 0 < a < b")]
    BadInterval(usize),
    #[error("intervals {0} and {1} overlap or are out of order")]
    NotDisjoint(usize, usize),
    #[error("zero denominator in interval {0}")]
    ZeroDenominator(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
