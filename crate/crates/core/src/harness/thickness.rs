//! Minimal diameter of the coincidence set: the narrowest slab containing it.

use serde::Serialize;

use crate::error::HarnessError;
use crate::grid::{NodeMask, Point};

/// Lower bound on the number of tested directions.
pub const MIN_DIRECTIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThicknessRecord {
    pub x: Point,
    pub r: f64,
    /// `MD(Λ ∩ B_r(x)) / r`.
    pub delta: f64,
    pub n_dirs: usize,
}

/// `MD({inactive nodes} ∩ B_r(x)) / r` over directions `kπ / n_dirs`.
///
/// Returns 0 for an empty set.
pub fn min_diameter(mask: &NodeMask, x: Point, r: f64, n_dirs: usize) -> Result<f64, HarnessError> {
    if n_dirs < MIN_DIRECTIONS {
        return Err(HarnessError::InvalidArgument(format!(
            "need at least {MIN_DIRECTIONS} directions, got {n_dirs}"
        )));
    }
    let grid = mask.grid();
    let pts: Vec<Point> = grid
        .nodes_in_ball(x, r)
        .into_iter()
        .filter(|&n| !mask.at(n))
        .map(|n| grid.point(n))
        .collect();
    if pts.is_empty() {
        return Ok(0.0);
    }
    let width = (0..n_dirs)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / n_dirs as f64;
            let (s, c) = t.sin_cos();
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let v = p[0] * c + p[1] * s;
                (lo.min(v), hi.max(v))
            });
            hi - lo
        })
        .fold(f64::INFINITY, f64::min);
    Ok(width / r)
}
