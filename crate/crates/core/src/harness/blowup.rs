//! Blow-up rescalings, half-space fits and monotonicity cones.

use serde::Serialize;

use crate::error::{GridError, HarnessError};
use crate::grid::{Grid2, NodeMask, Point, ScalarField};
use crate::operators::EllipticityPair;

/// Directions in the coarse search of [`halfspace_fit`].
pub const FIT_DIRECTIONS: usize = 256;
/// Samples of `γ ∈ [1/λ₁, 1/λ₀]` in the coarse search.
pub const FIT_GAMMAS: usize = 33;
/// Fits with a larger sup error are treated as "not a half-space".
pub const UNFIT_THRESHOLD: f64 = 0.2;

const CONE_DIRECTIONS: usize = 64;
const CONE_RESOLUTION: usize = 64;

fn check_rescale(grid: &Grid2, x: Point, r: f64, out_resolution: usize) -> Result<Grid2, HarnessError> {
    let min = 4.0 * grid.h();
    if r < min {
        return Err(GridError::RadiusTooSmall { r, min }.into());
    }
    grid.check_ball(x, r, 0.0)?;
    Ok(Grid2::new(1.0, out_resolution)?)
}

/// `y ↦ [u(x + r y) − u(x)] / r²` on `[-1, 1]²` with `out_resolution` cells per side.
pub fn rescale(u: &ScalarField, x: Point, r: f64, out_resolution: usize) -> Result<ScalarField, HarnessError> {
    let out = check_rescale(u.grid(), x, r, out_resolution)?;
    let u0 = u.bilinear(x).expect("x inside grid");
    Ok(ScalarField::from_fn(out, |y| {
        let v = u.bilinear([x[0] + r * y[0], x[1] + r * y[1]]).expect("inside grid");
        (v - u0) / (r * r)
    }))
}

/// The mask seen through the same rescaling, by nearest-node lookup.
pub fn rescale_mask(mask: &NodeMask, x: Point, r: f64, out_resolution: usize) -> Result<NodeMask, HarnessError> {
    let grid = mask.grid();
    let out = check_rescale(grid, x, r, out_resolution)?;
    Ok(NodeMask::from_fn(out, |y| {
        mask.at(grid.nearest_node([x[0] + r * y[0], x[1] + r * y[1]]))
    }))
}

/// Best half-space profile `γ [(y·e)₊]² / 2` in sup norm over the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfspaceFit {
    pub gamma: f64,
    pub e: [f64; 2],
    pub sup_err: f64,
}

struct FitData {
    pts: Vec<Point>,
    vals: Vec<f64>,
}

impl FitData {
    fn err(&self, angle: f64, gamma: f64) -> f64 {
        let (s, c) = angle.sin_cos();
        self.pts
            .iter()
            .zip(&self.vals)
            .map(|(p, v)| {
                let t = (p[0] * c + p[1] * s).max(0.0);
                (v - 0.5 * gamma * t * t).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Coarse search over [`FIT_DIRECTIONS`] × [`FIT_GAMMAS`], then compass refinement.
pub fn halfspace_fit(field: &ScalarField, ell: &EllipticityPair) -> HalfspaceFit {
    let grid = field.grid();
    let nodes = grid.nodes_in_ball([0.0, 0.0], 1.0);
    let data = FitData {
        pts: nodes.iter().map(|&n| grid.point(n)).collect(),
        vals: nodes.iter().map(|&n| field.at(n)).collect(),
    };
    let g_lo = 1.0 / ell.lambda1();
    let g_hi = 1.0 / ell.lambda0();
    let gammas: Vec<f64> = if g_hi > g_lo {
        (0..FIT_GAMMAS)
            .map(|k| g_lo + (g_hi - g_lo) * k as f64 / (FIT_GAMMAS - 1) as f64)
            .collect()
    } else {
        vec![g_lo]
    };
    let d_angle = 2.0 * std::f64::consts::PI / FIT_DIRECTIONS as f64;

    let mut best = (f64::INFINITY, 0.0, g_lo);
    for k in 0..FIT_DIRECTIONS {
        let angle = k as f64 * d_angle;
        for &gamma in &gammas {
            let e = data.err(angle, gamma);
            if e < best.0 {
                best = (e, angle, gamma);
            }
        }
    }

    let (mut err, mut angle, mut gamma) = best;
    let mut step_a = d_angle;
    let mut step_g = (g_hi - g_lo) / (FIT_GAMMAS - 1) as f64;
    for _ in 0..200 {
        if step_a < 1e-10 && step_g < 1e-12 {
            break;
        }
        let mut improved = false;
        let candidates = [
            (angle + step_a, gamma),
            (angle - step_a, gamma),
            (angle, (gamma + step_g).min(g_hi)),
            (angle, (gamma - step_g).max(g_lo)),
        ];
        for (a, g) in candidates {
            let e = data.err(a, g);
            if e < err {
                (err, angle, gamma) = (e, a, g);
                improved = true;
            }
        }
        if !improved {
            step_a *= 0.5;
            step_g *= 0.5;
        }
    }
    HalfspaceFit {
        gamma,
        e: [angle.cos(), angle.sin()],
        sup_err: err,
    }
}

/// Outcome of the monotonicity-cone search at one free-boundary point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeResult {
    pub fit: HalfspaceFit,
    /// `None` when the blow-up is not close to a half-space.
    pub e_axis: Option<[f64; 2]>,
    /// Smallest `s` in `{1, 0.9, ..., 0.1}` with every tested `e`, `e·e_axis ≥ s`, monotone.
    pub s: Option<f64>,
}

impl ConeResult {
    pub fn is_fit(&self) -> bool {
        self.e_axis.is_some()
    }
}

/// Axis from the half-space fit of the rescaled field, then the widest cone of
/// directions with `C0 ∂_e u ≥ −10h` on `B_{r/2}(x)`.
pub fn monotonicity_cone(
    u: &ScalarField,
    x: Point,
    r: f64,
    c0: f64,
    ell: &EllipticityPair,
) -> Result<ConeResult, HarnessError> {
    let blow = rescale(u, x, r, CONE_RESOLUTION)?;
    let fit = halfspace_fit(&blow, ell);
    if fit.sup_err > UNFIT_THRESHOLD {
        return Ok(ConeResult {
            fit,
            e_axis: None,
            s: None,
        });
    }
    let grid = u.grid();
    let h = grid.h();
    let grads = grid
        .nodes_in_ball(x, 0.5 * r)
        .into_iter()
        .map(|n| u.gradient(n))
        .collect::<Result<Vec<_>, _>>()?;
    let axis_angle = fit.e[1].atan2(fit.e[0]);
    // (e·axis, monotone?) per tested direction
    let dirs: Vec<(f64, bool)> = (0..CONE_DIRECTIONS)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / CONE_DIRECTIONS as f64;
            let e = [(axis_angle + t).cos(), (axis_angle + t).sin()];
            let min = grads
                .iter()
                .map(|g| c0 * (g[0] * e[0] + g[1] * e[1]))
                .fold(f64::INFINITY, f64::min);
            (t.cos(), min >= -10.0 * h)
        })
        .collect();
    let mut s = None;
    for tenth in (1..=10).rev() {
        let level = tenth as f64 / 10.0;
        if dirs.iter().all(|&(dot, ok)| dot < level - 1e-12 || ok) {
            s = Some(level);
        } else {
            break;
        }
    }
    Ok(ConeResult {
        fit,
        e_axis: Some(fit.e),
        s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{halfspace_oracle, radial_oracle};
    use std::f64::consts::PI;

    fn unit() -> EllipticityPair {
        EllipticityPair::unit()
    }

    #[test]
    fn halfspace_is_a_fixed_point() {
        let g = Grid2::new(1.0, 128).unwrap();
        let u = ScalarField::from_fn(g, |p| halfspace_oracle(1.0, 0.0, p));
        for r in [0.25, 0.5, 1.0] {
            let blow = rescale(&u, [0.0, 0.0], r, 64).unwrap();
            let exact = ScalarField::from_fn(*blow.grid(), |p| halfspace_oracle(1.0, 0.0, p));
            // bilinear interpolation error of a C^{1,1} profile
            assert!(blow.max_abs_diff(&exact) <= g.h(), "{r}");
        }
    }

    #[test]
    fn rescale_errors() {
        let g = Grid2::new(1.0, 64).unwrap();
        let u = ScalarField::zeros(g);
        assert!(matches!(
            rescale(&u, [0.0, 0.0], 2.0 * g.h(), 32),
            Err(HarnessError::Grid(GridError::RadiusTooSmall { .. }))
        ));
        assert!(rescale(&u, [0.8, 0.0], 0.25, 32).is_err());
    }

    #[test]
    fn radial_blowup_approaches_halfspace() {
        let g = Grid2::new(1.0, 256).unwrap();
        let u = ScalarField::from_fn(g, |p| radial_oracle(0.5, p));
        let mut last = f64::INFINITY;
        for r in [0.2, 0.1, 0.05] {
            let blow = rescale(&u, [0.5, 0.0], r, 64).unwrap();
            let exact = ScalarField::from_fn(*blow.grid(), |p| halfspace_oracle(1.0, 0.0, p));
            let err = blow
                .grid()
                .nodes_in_ball([0.0, 0.0], 1.0)
                .into_iter()
                .map(|n| (blow.at(n) - exact.at(n)).abs())
                .fold(0.0, f64::max);
            assert!(err < last, "{r}: {err}");
            last = err;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn fit_recovers_halfspace() {
        let g = Grid2::new(1.0, 64).unwrap();
        let f = ScalarField::from_fn(g, |p| halfspace_oracle(1.0, 0.0, p));
        let fit = halfspace_fit(&f, &unit());
        assert!((fit.gamma - 1.0).abs() < 1e-12);
        assert!(fit.sup_err <= 1e-10);
        assert!((fit.e[0] - 1.0).abs() < 1e-12);

        let f = ScalarField::from_fn(g, |p| halfspace_oracle(1.0, PI / 4.0, p));
        let fit = halfspace_fit(&f, &unit());
        let angle = fit.e[1].atan2(fit.e[0]);
        assert!((angle - PI / 4.0).abs() <= PI / 256.0);
    }

    #[test]
    fn fit_of_even_quadratic_is_poor() {
        // brute-force oracle over 2049 directions gives 1/2; the claim is ≥ 1/8
        let g = Grid2::new(1.0, 64).unwrap();
        let f = ScalarField::from_fn(g, |p| 0.5 * p[0] * p[0]);
        let fit = halfspace_fit(&f, &unit());
        assert!(fit.sup_err >= 0.125);
        let ell = EllipticityPair::new(0.5, 2.0).unwrap();
        let fit = halfspace_fit(&f, &ell);
        assert!(fit.sup_err >= 0.125);
        assert!(fit.gamma >= 0.5 && fit.gamma <= 2.0);
    }

    #[test]
    fn cone_of_halfspace() {
        let g = Grid2::new(1.0, 128).unwrap();
        let u = ScalarField::from_fn(g, |p| halfspace_oracle(1.0, 0.0, p));
        let cone = monotonicity_cone(&u, [0.0, 0.0], 0.5, 1.0, &unit()).unwrap();
        let axis = cone.e_axis.unwrap();
        assert!((axis[0] - 1.0).abs() < 1e-9);
        assert_eq!(cone.s, Some(0.1));
    }

    #[test]
    fn cone_of_radial() {
        let g = Grid2::new(1.0, 256).unwrap();
        let u = ScalarField::from_fn(g, |p| radial_oracle(0.5, p));
        let cone = monotonicity_cone(&u, [0.5, 0.0], 0.2, 1.0, &unit()).unwrap();
        let axis = cone.e_axis.unwrap();
        assert!(axis[0] > 0.99, "{axis:?}");
        assert!(cone.s.unwrap() <= 0.5);
    }

    #[test]
    fn cone_of_zero_is_unfit() {
        let g = Grid2::new(1.0, 64).unwrap();
        let u = ScalarField::zeros(g);
        let cone = monotonicity_cone(&u, [0.0, 0.0], 0.5, 1.0, &unit()).unwrap();
        assert!(!cone.is_fit());
        assert_eq!(cone.s, None);
    }

    #[test]
    fn mask_rescaling_is_consistent() {
        let g = Grid2::new(1.0, 128).unwrap();
        let mask = NodeMask::from_fn(g, |p| p[0] > 0.0);
        let blow = rescale_mask(&mask, [0.0, 0.25], 0.25, 32).unwrap();
        assert!(blow.at(blow.grid().nearest_node([0.5, 0.0])));
        assert!(!blow.at(blow.grid().nearest_node([-0.5, 0.0])));
    }
}
