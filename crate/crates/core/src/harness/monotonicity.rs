//! Almost-monotonicity improving to monotonicity in a smaller ball.

use serde::{Deserialize, Serialize};

use crate::grid::{Point, ScalarField};
use crate::operators::EllipticityPair;

use super::DIM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityVariant {
    /// `C0 ∂_e u − u`, for positivity sets containing `{u ≠ 0}`.
    U,
    /// `C0 ∂_e u − |∇u|²`, for positivity sets containing `{∇u ≠ 0}`.
    GradSq,
}

/// Largest admissible `ε₀`: `1/(8nλ₁)` for [`MonotonicityVariant::U`],
/// `λ₀/(4n²λ₁³)` for [`MonotonicityVariant::GradSq`].
pub fn monotonicity_threshold(variant: MonotonicityVariant, ell: &EllipticityPair) -> f64 {
    let n = DIM as f64;
    match variant {
        MonotonicityVariant::U => 1.0 / (8.0 * n * ell.lambda1()),
        MonotonicityVariant::GradSq => ell.lambda0() / (4.0 * n * n * ell.lambda1().powi(3)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityCheck {
    pub e: [f64; 2],
    pub c0: f64,
    pub variant: MonotonicityVariant,
    /// `−min` of the quantity over `B_1`, clamped below at 0.
    pub eps0: f64,
    /// Min of the quantity over `B_{1/2}`.
    pub min_half: f64,
    pub threshold: f64,
    /// `eps0 ≤ threshold`.
    pub hypothesis: bool,
    /// `min_half ≥ −10h`.
    pub conclusion: bool,
    /// The implication `hypothesis ⇒ conclusion`.
    pub pass: bool,
}

/// Evaluates the monotonicity quantity on `B_1(center)` and `B_{1/2}(center)`
/// using central-difference gradients; nodes on the grid edge are skipped.
pub fn directional_monotonicity(
    u: &ScalarField,
    center: Point,
    e: [f64; 2],
    c0: f64,
    variant: MonotonicityVariant,
    ell: &EllipticityPair,
) -> MonotonicityCheck {
    let grid = u.grid();
    let h = grid.h();
    let mut min_full = f64::INFINITY;
    let mut min_half = f64::INFINITY;
    for node in grid.nodes_in_ball(center, 1.0) {
        let Ok(g) = u.gradient(node) else { continue };
        let de = g[0] * e[0] + g[1] * e[1];
        let q = match variant {
            MonotonicityVariant::U => c0 * de - u.at(node),
            MonotonicityVariant::GradSq => c0 * de - (g[0] * g[0] + g[1] * g[1]),
        };
        min_full = min_full.min(q);
        let p = grid.point(node);
        if (p[0] - center[0]).hypot(p[1] - center[1]) <= 0.5 + 1e-12 {
            min_half = min_half.min(q);
        }
    }
    let eps0 = (-min_full).max(0.0);
    let threshold = monotonicity_threshold(variant, ell);
    let hypothesis = eps0 <= threshold;
    let conclusion = min_half >= -10.0 * h;
    MonotonicityCheck {
        e,
        c0,
        variant,
        eps0,
        min_half,
        threshold,
        hypothesis,
        conclusion,
        pass: !hypothesis || conclusion,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::halfspace_oracle;
    use crate::grid::Grid2;

    #[test]
    fn thresholds_for_unit_ellipticity() {
        let ell = EllipticityPair::unit();
        assert_eq!(monotonicity_threshold(MonotonicityVariant::U, &ell), 1.0 / 16.0);
        assert_eq!(monotonicity_threshold(MonotonicityVariant::GradSq, &ell), 1.0 / 16.0);
        let ell = EllipticityPair::new(1.0, 2.0).unwrap();
        assert_eq!(monotonicity_threshold(MonotonicityVariant::U, &ell), 1.0 / 32.0);
        assert_eq!(monotonicity_threshold(MonotonicityVariant::GradSq, &ell), 1.0 / 128.0);
    }

    #[test]
    fn halfspace_is_monotone_along_its_normal() {
        let g = Grid2::new(1.0, 64).unwrap();
        let u = ScalarField::from_fn(g, |p| halfspace_oracle(1.0, 0.0, p));
        let ell = EllipticityPair::unit();
        for variant in [MonotonicityVariant::U, MonotonicityVariant::GradSq] {
            let chk = directional_monotonicity(&u, [0.0, 0.0], [1.0, 0.0], 1.0, variant, &ell);
            assert_eq!(chk.eps0, 0.0);
            assert_eq!(chk.min_half, 0.0);
            assert!(chk.hypothesis && chk.conclusion && chk.pass);
        }
    }

    #[test]
    fn orthogonal_direction_fails() {
        // needs 10h < 1/8 for the failure to show through the slack
        let g = Grid2::new(1.0, 256).unwrap();
        let u = ScalarField::from_fn(g, |p| halfspace_oracle(1.0, 0.0, p));
        let chk = directional_monotonicity(
            &u,
            [0.0, 0.0],
            [0.0, 1.0],
            1.0,
            MonotonicityVariant::U,
            &EllipticityPair::unit(),
        );
        assert_eq!(chk.min_half, -0.125);
        assert!(!chk.conclusion);
        assert!(!chk.hypothesis);
    }
}
