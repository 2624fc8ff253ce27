//! The fixed registry of harness checks runnable from a config.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use fbreg_core::harness::{
    cone_barrier_report, directional_monotonicity, dyadic_projection_track, dyadic_radii,
    halfspace_fit, hessian_sup, min_diameter, monotonicity_cone, nondegeneracy_check, rescale,
    rescale_mask, volume_decay, MonotonicityVariant,
};
use fbreg_core::{
    free_boundary_nodes, residual, ObstacleProblem, OperatorSpec, Point, Solution,
};

use crate::config::CheckSpec;
use crate::report::{sort_records, CheckReport, Record};

/// Every accepted check name.
pub const REGISTRY: [&str; 10] = [
    "residual",
    "hessian_sup",
    "projection",
    "volume_decay",
    "nondegeneracy",
    "thickness",
    "monotonicity",
    "halfspace_fit",
    "monotonicity_cone",
    "cone_barrier",
];

fn origin() -> Point {
    [0.0, 0.0]
}

fn quarter() -> f64 {
    0.25
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallParams {
    #[serde(default = "origin")]
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionParams {
    /// Snapped to the nearest node.
    #[serde(default = "origin")]
    pub center: Point,
    #[serde(default = "quarter")]
    pub r_max: f64,
    /// Levels with `|P_r|` above this report whether the complement halves.
    #[serde(default)]
    pub m_threshold: f64,
}

/// Points default to the discrete free boundary and radii to the dyadic
/// sequence `1/4, 1/8, ...` down to `8h`; defaulted pairs whose ball leaves
/// the grid are skipped.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRadiiParams {
    pub points: Option<Vec<Point>>,
    pub radii: Option<Vec<f64>>,
    /// Defaults to the operator's `λ₁`.
    pub lambda1: Option<f64>,
    /// Direction count for thickness.
    pub n_dirs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicityParams {
    #[serde(default = "origin")]
    pub center: Point,
    #[serde(default = "e1")]
    pub e: [f64; 2],
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default = "both_variants")]
    pub variants: Vec<MonotonicityVariant>,
}

fn e1() -> [f64; 2] {
    [1.0, 0.0]
}

fn both_variants() -> Vec<MonotonicityVariant> {
    vec![MonotonicityVariant::U, MonotonicityVariant::GradSq]
}

fn default_resolution() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupParams {
    #[serde(default = "origin")]
    pub x: Point,
    pub r: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "one")]
    pub c0: f64,
}

fn default_theta1() -> f64 {
    0.6 * PI
}

fn default_annulus() -> (f64, f64) {
    (0.5, 1.0)
}

fn default_barrier_cells() -> usize {
    128
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierParams {
    #[serde(default = "default_theta1")]
    pub theta1: f64,
    #[serde(default = "default_annulus")]
    pub annulus: (f64, f64),
    #[serde(default = "default_barrier_cells")]
    pub n_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Residual,
    HessianSup(BallParams),
    Projection(ProjectionParams),
    VolumeDecay(ProjectionParams),
    Nondegeneracy(PointRadiiParams),
    Thickness(PointRadiiParams),
    Monotonicity(MonotonicityParams),
    HalfspaceFit(BlowupParams),
    MonotonicityCone(BlowupParams),
    ConeBarrier(BarrierParams),
}

fn params<T: DeserializeOwned>(spec: &CheckSpec) -> Result<T> {
    let value = match &spec.params {
        serde_json::Value::Null => serde_json::Value::Object(Default::default()),
        v => v.clone(),
    };
    serde_json::from_value(value).with_context(|| format!("bad params for check `{}`", spec.name))
}

/// Everything a check may read.
pub struct CheckInputs<'a> {
    pub sol: &'a Solution,
    pub operator: &'a OperatorSpec,
    pub k_bound: f64,
}

impl Check {
    pub fn from_spec(spec: &CheckSpec) -> Result<Self> {
        Ok(match spec.name.as_str() {
            "residual" => Check::Residual,
            "hessian_sup" => Check::HessianSup(params(spec)?),
            "projection" => Check::Projection(params(spec)?),
            "volume_decay" => Check::VolumeDecay(params(spec)?),
            "nondegeneracy" => Check::Nondegeneracy(params(spec)?),
            "thickness" => Check::Thickness(params(spec)?),
            "monotonicity" => Check::Monotonicity(params(spec)?),
            "halfspace_fit" => Check::HalfspaceFit(params(spec)?),
            "monotonicity_cone" => Check::MonotonicityCone(params(spec)?),
            "cone_barrier" => Check::ConeBarrier(params(spec)?),
            other => bail!("unknown check `{other}`; known checks: {}", REGISTRY.join(", ")),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Check::Residual => "residual",
            Check::HessianSup(_) => "hessian_sup",
            Check::Projection(_) => "projection",
            Check::VolumeDecay(_) => "volume_decay",
            Check::Nondegeneracy(_) => "nondegeneracy",
            Check::Thickness(_) => "thickness",
            Check::Monotonicity(_) => "monotonicity",
            Check::HalfspaceFit(_) => "halfspace_fit",
            Check::MonotonicityCone(_) => "monotonicity_cone",
            Check::ConeBarrier(_) => "cone_barrier",
        }
    }

    /// Hard checks decide the exit status; the rest only report.
    pub fn is_hard(&self) -> bool {
        matches!(self, Check::Nondegeneracy(_) | Check::Monotonicity(_))
    }

    pub fn run(&self, ctx: &CheckInputs) -> Result<CheckReport> {
        let name = self.name();
        let hard = self.is_hard();
        let rec = |x: Option<Point>, r: Option<f64>| Record::new(name, hard, x, r);
        let sol = ctx.sol;
        let grid = *sol.grid();
        let h = grid.h();
        let ell = ctx.operator.ellipticity();
        let mut records = match self {
            Check::Residual => {
                let problem = ObstacleProblem::new(ctx.operator.clone(), sol.u.clone(), ctx.k_bound)?;
                vec![rec(None, None)
                    .with("residual", residual(&problem, &sol.u)?)
                    .with("recorded_residual", sol.residual)
                    .with("k_bound", ctx.k_bound)]
            }
            Check::HessianSup(p) => {
                vec![rec(Some(p.center), Some(p.radius)).with("sup", hessian_sup(&sol.u, p.center, p.radius)?)]
            }
            Check::Projection(p) => {
                let node = grid.nearest_node(p.center);
                let x = grid.point(node);
                dyadic_projection_track(ctx.operator, &sol.u, node, p.r_max)?
                    .into_iter()
                    .map(|t| {
                        rec(Some(x), Some(t.r))
                            .with("q11", t.q.a11)
                            .with("q12", t.q.a12)
                            .with("q22", t.q.a22)
                            .with("beta", t.beta)
                            .with("p11", t.p.a11)
                            .with("p12", t.p.a12)
                            .with("p22", t.p.a22)
                            .with("p_norm", t.p.frobenius())
                            .with("level_set_residual", (ctx.operator.eval(&t.p) - 1.0).abs())
                            .with("deviation", t.deviation)
                            .with("growth", t.growth)
                            .with_opt("dyadic_gap", t.dyadic_gap)
                    })
                    .collect()
            }
            Check::VolumeDecay(p) => {
                let node = grid.nearest_node(p.center);
                let x = grid.point(node);
                volume_decay(ctx.operator, sol, node, p.r_max, p.m_threshold)?
                    .into_iter()
                    .map(|v| {
                        rec(Some(x), Some(v.r))
                            .with("a_r", v.a_r)
                            .with("p_norm", v.p_norm)
                            .with_opt("halves", v.halves.map(f64::from))
                    })
                    .collect()
            }
            Check::Nondegeneracy(p) => {
                let lambda1 = p.lambda1.unwrap_or(ell.lambda1());
                point_radius_pairs(sol, p)?
                    .into_par_iter()
                    .map(|(x, radii)| {
                        Ok(nondegeneracy_check(&sol.u, x, &radii, lambda1)?
                            .into_iter()
                            .map(|n| {
                                rec(Some(x), Some(n.r))
                                    .with("lhs", n.lhs)
                                    .with("rhs", n.rhs)
                                    .with("slack", 10.0 * h * n.r)
                                    .with_pass(n.pass)
                            })
                            .collect::<Vec<_>>())
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .collect()
            }
            Check::Thickness(p) => {
                let n_dirs = p.n_dirs.unwrap_or(128);
                point_radius_pairs(sol, p)?
                    .into_par_iter()
                    .flat_map(|(x, radii)| radii.into_par_iter().map(move |r| (x, r)))
                    .map(|(x, r)| {
                        let delta = min_diameter(&sol.active_mask, x, r, n_dirs)?;
                        // matching node spacing keeps the rescaled mask a relabelling
                        let res = (2 * (r / h).round() as usize).max(8);
                        let blown = rescale_mask(&sol.active_mask, x, r, res)?;
                        let delta1 = min_diameter(&blown, [0.0, 0.0], 1.0, n_dirs)?;
                        Ok(rec(Some(x), Some(r))
                            .with("delta", delta)
                            .with("delta_rescaled", delta1)
                            .with("slack", 2.0 / n_dirs as f64 + h / r)
                            .with("n_dirs", n_dirs as f64))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Check::Monotonicity(p) => {
                let norm = p.e[0].hypot(p.e[1]);
                if norm.is_nan() || norm <= 0.0 {
                    bail!("monotonicity direction must be non-zero");
                }
                let e = [p.e[0] / norm, p.e[1] / norm];
                p.variants
                    .iter()
                    .map(|&variant| {
                        let c = directional_monotonicity(&sol.u, p.center, e, p.c0, variant, &ell);
                        rec(Some(p.center), Some(1.0))
                            .labeled(match variant {
                                MonotonicityVariant::U => "u",
                                MonotonicityVariant::GradSq => "grad_sq",
                            })
                            .with("e_x", e[0])
                            .with("e_y", e[1])
                            .with("c0", p.c0)
                            .with("eps0", c.eps0)
                            .with("min_half", c.min_half)
                            .with("threshold", c.threshold)
                            .with("hypothesis", f64::from(c.hypothesis))
                            .with("conclusion", f64::from(c.conclusion))
                            .with_pass(c.pass)
                    })
                    .collect()
            }
            Check::HalfspaceFit(p) => {
                let fit = halfspace_fit(&rescale(&sol.u, p.x, p.r, p.resolution)?, &ell);
                vec![rec(Some(p.x), Some(p.r))
                    .with("gamma", fit.gamma)
                    .with("e_x", fit.e[0])
                    .with("e_y", fit.e[1])
                    .with("sup_err", fit.sup_err)]
            }
            Check::MonotonicityCone(p) => {
                let cone = monotonicity_cone(&sol.u, p.x, p.r, p.c0, &ell)?;
                vec![rec(Some(p.x), Some(p.r))
                    .with("gamma", cone.fit.gamma)
                    .with("sup_err", cone.fit.sup_err)
                    .with_opt("e_x", cone.e_axis.map(|e| e[0]))
                    .with_opt("e_y", cone.e_axis.map(|e| e[1]))
                    .with_opt("s", cone.s)]
            }
            Check::ConeBarrier(p) => {
                let report = cone_barrier_report(p.theta1, &ell, p.annulus, p.n_cells)?;
                report
                    .conventions
                    .iter()
                    .map(|c| {
                        rec(None, None)
                            .labeled(serde_json::to_value(c.convention)
                                .ok()
                                .and_then(|v| v.as_str().map(str::to_string))
                                .unwrap_or_default())
                            .with("theta1", report.theta1)
                            .with("alpha", c.alpha)
                            .with_opt("first_beta", c.first_beta.map(f64::from))
                            .with("min_subsolution", c.eval.min_subsolution)
                            .with("vanishing_upper", c.eval.vanishing_upper)
                            .with("vanishing_lower", c.eval.vanishing_lower)
                            .with("h", report.h)
                    })
                    .collect()
            }
        };
        sort_records(&mut records);
        Ok(CheckReport {
            name: name.to_string(),
            hard,
            records,
        })
    }
}

/// `(x, radii)` work items; defaulted pairs that do not fit in the grid are dropped.
fn point_radius_pairs(sol: &Solution, p: &PointRadiiParams) -> Result<Vec<(Point, Vec<f64>)>> {
    let grid = *sol.grid();
    let points = match &p.points {
        Some(pts) => pts.clone(),
        None => free_boundary_nodes(sol).into_iter().map(|n| grid.point(n)).collect(),
    };
    let radii = p.radii.clone().unwrap_or_else(|| dyadic_radii(0.25, 8.0 * grid.h()));
    let defaulted = p.points.is_none() || p.radii.is_none();
    Ok(points
        .into_iter()
        .map(|x| {
            let rs: Vec<f64> = if defaulted {
                radii.iter().copied().filter(|&r| grid.ball_fits(x, r, 0.0)).collect()
            } else {
                radii.clone()
            };
            (x, rs)
        })
        .filter(|(_, rs)| !rs.is_empty())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fbreg_core::boundary::halfspace_oracle;
    use fbreg_core::{Grid2, ScalarField};

    fn spec(name: &str, params: serde_json::Value) -> CheckSpec {
        CheckSpec {
            name: name.into(),
            params,
        }
    }

    #[test]
    fn registry_round_trip() {
        for name in REGISTRY {
            let p = match name {
                "hessian_sup" => serde_json::json!({"radius": 0.5}),
                "halfspace_fit" | "monotonicity_cone" => serde_json::json!({"r": 0.5}),
                _ => serde_json::Value::Null,
            };
            assert_eq!(Check::from_spec(&spec(name, p)).unwrap().name(), name);
        }
        assert!(Check::from_spec(&spec("bogus", serde_json::Value::Null)).is_err());
        assert!(Check::from_spec(&spec("hessian_sup", serde_json::Value::Null)).is_err());
        assert!(Check::from_spec(&spec("projection", serde_json::json!({"typo": 1}))).is_err());
    }

    #[test]
    fn halfspace_hard_checks_pass() {
        let grid = Grid2::new(1.0, 64).unwrap();
        let sol = Solution::from_field(ScalarField::from_fn(grid, |p| halfspace_oracle(1.0, 0.0, p)), 0, 0.0);
        let op = OperatorSpec::laplace();
        let ctx = CheckInputs {
            sol: &sol,
            operator: &op,
            k_bound: 0.0,
        };
        for name in ["nondegeneracy", "monotonicity"] {
            let rep = Check::from_spec(&spec(name, serde_json::Value::Null)).unwrap().run(&ctx).unwrap();
            assert!(!rep.records.is_empty());
            assert_eq!(rep.failures(), 0, "{name}");
        }
    }
}
