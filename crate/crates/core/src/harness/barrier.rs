//! Angular barrier `v = r^α (e^{−β sin(αθ)} − e^{−β})` on a sector.
//!
//! The exponent convention is ambiguous (`α = π/θ₁` versus `α = π/(2θ₁)`),
//! so the report evaluates both and does not pick one.

use serde::Serialize;

use crate::grid::{Grid2, ScalarField};
use crate::operators::{pucci_minus, EllipticityPair};

/// Largest `β` tried by the search.
pub const BARRIER_BETA_MAX: u32 = 50;
/// A discrete subsolution may dip this far below zero.
pub const BARRIER_PASS_FLOOR: f64 = -1e-4;

const RAY_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeBarrierSpec {
    /// Sector half-opening, in `(π/2, π)`.
    pub theta1: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaConvention {
    /// `α = π/θ₁`.
    PiOverTheta1,
    /// `α = π/(2θ₁)`.
    PiOverTwoTheta1,
}

impl AlphaConvention {
    pub fn alpha(self, theta1: f64) -> f64 {
        match self {
            AlphaConvention::PiOverTheta1 => std::f64::consts::PI / theta1,
            AlphaConvention::PiOverTwoTheta1 => std::f64::consts::PI / (2.0 * theta1),
        }
    }
}

/// `v(r, θ)`.
pub fn barrier_value(spec: &ConeBarrierSpec, r: f64, theta: f64) -> f64 {
    r.powf(spec.alpha) * ((-spec.beta * (spec.alpha * theta).sin()).exp() - (-spec.beta).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierEval {
    /// Min of `P⁻(D²_h v)` over grid nodes of the annulus with `|θ| ≤ θ₁`.
    pub min_subsolution: f64,
    /// Max `|v|` on the ray `θ = θ₁`.
    pub vanishing_upper: f64,
    /// Max `|v|` on the ray `θ = −θ₁`.
    pub vanishing_lower: f64,
}

impl BarrierEval {
    pub fn vanishing_check(&self) -> f64 {
        self.vanishing_upper.max(self.vanishing_lower)
    }
}

/// Evaluates `v` on `grid` and measures the subsolution and vanishing properties
/// on the annulus `r_in ≤ |x| ≤ r_out`.
pub fn cone_barrier(
    spec: &ConeBarrierSpec,
    grid: Grid2,
    annulus: (f64, f64),
    ell: &EllipticityPair,
) -> BarrierEval {
    let (r_in, r_out) = annulus;
    let v = ScalarField::from_fn(grid, |p| barrier_value(spec, p[0].hypot(p[1]), p[1].atan2(p[0])));
    let mut min_sub = f64::INFINITY;
    for node in grid.nodes() {
        let p = grid.point(node);
        let r = p[0].hypot(p[1]);
        if r < r_in || r > r_out || p[1].atan2(p[0]).abs() > spec.theta1 {
            continue;
        }
        if let Ok(m) = v.hessian(node) {
            min_sub = min_sub.min(pucci_minus(&m, ell));
        }
    }
    let ray = |theta: f64| {
        (0..RAY_SAMPLES)
            .map(|k| {
                let r = r_in + (r_out - r_in) * k as f64 / (RAY_SAMPLES - 1) as f64;
                barrier_value(spec, r, theta).abs()
            })
            .fold(0.0, f64::max)
    };
    BarrierEval {
        min_subsolution: if min_sub.is_finite() { min_sub } else { 0.0 },
        vanishing_upper: ray(spec.theta1),
        vanishing_lower: ray(-spec.theta1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConventionReport {
    pub convention: AlphaConvention,
    pub alpha: f64,
    /// First `β ∈ {1, ..., 50}` with `min_subsolution ≥ −1e-4`.
    pub first_beta: Option<u32>,
    /// Evaluation at `first_beta`, or at `β = 50` when none qualifies.
    pub eval: BarrierEval,
    /// `min_subsolution` for every tried `β`, in order.
    pub min_by_beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeBarrierReport {
    pub theta1: f64,
    pub annulus: (f64, f64),
    pub h: f64,
    pub conventions: Vec<ConventionReport>,
}

/// β-search for both exponent conventions.
pub fn cone_barrier_report(
    theta1: f64,
    ell: &EllipticityPair,
    annulus: (f64, f64),
    n_cells: usize,
) -> Result<ConeBarrierReport, crate::error::HarnessError> {
    use std::f64::consts::{FRAC_PI_2, PI};
    if !(theta1 > FRAC_PI_2 && theta1 < PI) {
        return Err(crate::error::HarnessError::InvalidArgument(format!(
            "theta1 must lie in (π/2, π), got {theta1}"
        )));
    }
    if !(annulus.0 > 0.0 && annulus.0 < annulus.1) {
        return Err(crate::error::HarnessError::InvalidArgument(
            "annulus must satisfy 0 < r_in < r_out".into(),
        ));
    }
    // margin of two cells so every annulus node has a full stencil
    let grid = Grid2::new(annulus.1 * (1.0 + 4.0 / n_cells as f64), n_cells)?;
    let conventions = [AlphaConvention::PiOverTheta1, AlphaConvention::PiOverTwoTheta1]
        .into_iter()
        .map(|convention| {
            let alpha = convention.alpha(theta1);
            let mut min_by_beta = Vec::new();
            let mut found = None;
            let mut last = None;
            for beta in 1..=BARRIER_BETA_MAX {
                let spec = ConeBarrierSpec {
                    theta1,
                    alpha,
                    beta: beta as f64,
                };
                let eval = cone_barrier(&spec, grid, annulus, ell);
                min_by_beta.push(eval.min_subsolution);
                last = Some(eval);
                if eval.min_subsolution >= BARRIER_PASS_FLOOR {
                    found = Some((beta, eval));
                    break;
                }
            }
            let (first_beta, eval) = match found {
                Some((b, e)) => (Some(b), e),
                None => (None, last.expect("non-empty beta range")),
            };
            ConventionReport {
                convention,
                alpha,
                first_beta,
                eval,
                min_by_beta,
            }
        })
        .collect();
    Ok(ConeBarrierReport {
        theta1,
        annulus,
        h: grid.h(),
        conventions,
    })
}
