use crate::error::HarnessError;
use crate::grid::{Point, ScalarField};

/// Max Frobenius norm of the discrete Hessian over nodes of `B_radius(center)`.
pub fn hessian_sup(u: &ScalarField, center: Point, radius: f64) -> Result<f64, HarnessError> {
    let grid = u.grid();
    grid.check_ball(center, radius, 2.0 * grid.h())?;
    let mut sup = 0.0_f64;
    for node in grid.nodes_in_ball(center, radius) {
        sup = sup.max(u.hessian(node)?.frobenius());
    }
    Ok(sup)
}
