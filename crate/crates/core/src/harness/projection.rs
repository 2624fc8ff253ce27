//! Dyadic quadratic models `P_r ∈ {F = 1}` and the volume of the complement.

use serde::Serialize;

use crate::error::HarnessError;
use crate::grid::{Node, ScalarField};
use crate::operators::{project_to_level_set, OperatorSpec, SymMat};
use crate::solver::Solution;

use super::DIM;

/// Per-radius quadratic model of `u` around a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionRecord {
    pub r: f64,
    /// Node average of the discrete Hessian over `B_r`.
    pub q: SymMat,
    /// Identity shift with `F(q + beta Id) = 1`.
    pub beta: f64,
    pub p: SymMat,
    /// `(avg over B_r of |D²u − P_r|²)^{1/2}`.
    pub deviation: f64,
    /// `sup over B_r of |ũ − ½⟨P_r y, y⟩| / r²`, with `ũ` the affinely normalized field.
    pub growth: f64,
    /// `|P_{2r} − P_r|` (Frobenius); `None` at the largest radius.
    pub dyadic_gap: Option<f64>,
}

/// `r_max, r_max/2, ...` down to `min_r` inclusive.
pub fn dyadic_radii(r_max: f64, min_r: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = r_max;
    while r >= min_r * (1.0 - 1e-12) {
        out.push(r);
        r *= 0.5;
    }
    out
}

/// Tracks `P_r` for `r = r_max, r_max/2, ..., 8h` around `center`.
///
/// The field is normalized by subtracting `u(center)` and the central
/// difference gradient there before the growth quantity is measured.
pub fn dyadic_projection_track(
    spec: &OperatorSpec,
    u: &ScalarField,
    center: Node,
    r_max: f64,
) -> Result<Vec<ProjectionRecord>, HarnessError> {
    if !(r_max > 0.0 && r_max <= 0.25) {
        return Err(HarnessError::InvalidArgument(format!(
            "r_max must lie in (0, 1/4], got {r_max}"
        )));
    }
    let grid = u.grid();
    let h = grid.h();
    let c = grid.point(center);
    grid.check_ball(c, r_max, 2.0 * h)?;
    let radii = dyadic_radii(r_max, 8.0 * h);
    if radii.len() < 2 {
        return Err(HarnessError::TooFewLevels(radii.len()));
    }
    let u0 = u.at(center);
    let g = u.gradient(center)?;

    let mut out: Vec<ProjectionRecord> = Vec::with_capacity(radii.len());
    for r in radii {
        let nodes = grid.nodes_in_ball(c, r);
        let hessians = nodes
            .iter()
            .map(|&n| u.hessian(n))
            .collect::<Result<Vec<_>, _>>()?;
        let count = hessians.len() as f64;
        let q = hessians
            .iter()
            .fold(SymMat::zero(DIM), |acc, m| acc + *m)
            * (1.0 / count);
        let (beta, p) = project_to_level_set(spec, &q);
        let deviation = (hessians
            .iter()
            .map(|m| (*m - p).frobenius().powi(2))
            .sum::<f64>()
            / count)
            .sqrt();
        let growth = nodes
            .iter()
            .map(|&n| {
                let x = grid.point(n);
                let y = [x[0] - c[0], x[1] - c[1]];
                let normalized = u.at(n) - u0 - g[0] * y[0] - g[1] * y[1];
                (normalized - 0.5 * p.quadratic_form(y)).abs()
            })
            .fold(0.0, f64::max)
            / (r * r);
        let dyadic_gap = out.last().map(|prev| (prev.p - p).frobenius());
        out.push(ProjectionRecord {
            r,
            q,
            beta,
            p,
            deviation,
            growth,
            dyadic_gap,
        });
    }
    Ok(out)
}

/// Rescaled complement volume `|A_r|` paired with `|P_r|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeRecord {
    pub r: f64,
    /// `#(inactive nodes in B_r) h² / r²`: the measure of `{y ∈ B_1 : x + r y ∉ Ω}`.
    pub a_r: f64,
    pub p_norm: f64,
    /// At levels with `|P_r| > m_threshold`: whether `|A_{r/2}| ≤ |A_r| / 2ⁿ`.
    pub halves: Option<bool>,
}

/// Complement volume decay along the dyadic sequence of [`dyadic_projection_track`].
pub fn volume_decay(
    spec: &OperatorSpec,
    sol: &Solution,
    center: Node,
    r_max: f64,
    m_threshold: f64,
) -> Result<Vec<VolumeRecord>, HarnessError> {
    let track = dyadic_projection_track(spec, &sol.u, center, r_max)?;
    let grid = sol.grid();
    let h2 = grid.h().powi(2);
    let c = grid.point(center);
    let mut out: Vec<VolumeRecord> = track
        .iter()
        .map(|rec| {
            let inactive = grid
                .nodes_in_ball(c, rec.r)
                .into_iter()
                .filter(|&n| !sol.active_mask.at(n))
                .count();
            VolumeRecord {
                r: rec.r,
                a_r: inactive as f64 * h2 / (rec.r * rec.r),
                p_norm: rec.p.frobenius(),
                halves: None,
            }
        })
        .collect();
    let factor = 2f64.powi(DIM as i32);
    for k in 0..out.len().saturating_sub(1) {
        if out[k].p_norm > m_threshold {
            out[k].halves = Some(out[k + 1].a_r <= out[k].a_r / factor);
        }
    }
    Ok(out)
}
