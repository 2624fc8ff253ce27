//! Quadratic lower growth away from points of the closed positivity set.

use serde::Serialize;

use crate::error::HarnessError;
use crate::grid::{Point, ScalarField};

use super::DIM;

/// Points sampled on each circle `∂B_r(x0)`.
pub const CIRCLE_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NondegeneracyRecord {
    pub r: f64,
    /// `max` of interpolated `u` over `∂B_r(x0)`.
    pub lhs: f64,
    /// `u(x0) + r² / (2 n λ₁)`.
    pub rhs: f64,
    /// `lhs ≥ rhs − 10 h r`.
    pub pass: bool,
}

/// `r² / (2 n λ₁)`.
pub fn nondegeneracy_rhs(r: f64, lambda1: f64) -> f64 {
    r * r / (2.0 * DIM as f64 * lambda1)
}

pub fn nondegeneracy_check(
    u: &ScalarField,
    x0: Point,
    radii: &[f64],
    lambda1: f64,
) -> Result<Vec<NondegeneracyRecord>, HarnessError> {
    let grid = u.grid();
    let h = grid.h();
    let u0 = u
        .bilinear(x0)
        .ok_or(HarnessError::Grid(crate::error::GridError::RadiusTooLarge {
            x: x0[0],
            y: x0[1],
            radius: 0.0,
        }))?;
    radii
        .iter()
        .map(|&r| {
            grid.check_ball(x0, r, 0.0)?;
            let lhs = (0..CIRCLE_SAMPLES)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_SAMPLES as f64;
                    let p = [x0[0] + r * t.cos(), x0[1] + r * t.sin()];
                    u.bilinear(p).expect("circle inside grid")
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let rhs = u0 + nondegeneracy_rhs(r, lambda1);
            Ok(NondegeneracyRecord {
                r,
                lhs,
                rhs,
                pass: lhs >= rhs - 10.0 * h * r,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{halfspace_oracle, radial_oracle};
    use crate::grid::Grid2;

    #[test]
    fn halfspace_instance() {
        let g = Grid2::new(1.0, 128).unwrap();
        let u = ScalarField::from_fn(g, |p| halfspace_oracle(1.0, 0.0, p));
        let rec = &nondegeneracy_check(&u, [0.0, 0.0], &[0.5], 1.0).unwrap()[0];
        assert!((rec.lhs - 0.125).abs() < 1e-12);
        assert_eq!(rec.rhs, 0.0625);
        assert!(rec.pass);
    }

    #[test]
    fn radial_instance() {
        let g = Grid2::new(1.0, 256).unwrap();
        let u = ScalarField::from_fn(g, |p| radial_oracle(0.5, p));
        let rec = &nondegeneracy_check(&u, [0.5, 0.0], &[0.25], 1.0).unwrap()[0];
        // interpolation at (0.75, 0) hits a node exactly
        assert!((rec.lhs - 0.027_441_861_486_479_452).abs() < 1e-12);
        assert_eq!(rec.rhs, 0.015625);
        assert!(rec.pass);
    }

    #[test]
    fn zero_field_fails() {
        // the slack 10 h r hides r²/4 unless r > 40 h
        let g = Grid2::new(1.0, 512).unwrap();
        let u = ScalarField::zeros(g);
        let recs = nondegeneracy_check(&u, [0.0, 0.0], &[0.5, 0.25], 1.0).unwrap();
        assert!(recs.iter().all(|r| r.lhs == 0.0 && !r.pass));
        assert!(nondegeneracy_check(&u, [0.9, 0.0], &[0.25], 1.0).is_err());
    }
}
