//! Dirichlet data descriptors and the closed-form reference solutions.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{BoundaryError, SnapshotError};
use crate::grid::{Grid2, Point, ScalarField};
use crate::snapshot;

/// Radial solution of `Δu = 1` in `{|x| > r0}` with `u = ∇u = 0` on `|x| = r0`.
///
/// `u(r) = r²/4 − r0²/4 − (r0²/2) ln(r/r0)` for `r ≥ r0`, zero inside.
pub fn radial_oracle(r0: f64, p: Point) -> f64 {
    let r = p[0].hypot(p[1]);
    if r <= r0 {
        return 0.0;
    }
    0.25 * (r * r - r0 * r0) - 0.5 * r0 * r0 * (r / r0).ln()
}

/// Frobenius norm of the radial oracle's Hessian at radius `r`.
pub fn radial_oracle_hessian_norm(r0: f64, r: f64) -> f64 {
    if r < r0 {
        return 0.0;
    }
    let a = 0.5 * r0 * r0 / (r * r);
    // radial and tangential eigenvalues u'' and u'/r
    (0.5 + a).hypot(0.5 - a)
}

/// `γ [(x·e)₊]² / 2` with `e = (cos angle, sin angle)`.
pub fn halfspace_oracle(gamma: f64, angle: f64, p: Point) -> f64 {
    let s = (p[0] * angle.cos() + p[1] * angle.sin()).max(0.0);
    0.5 * gamma * s * s
}

/// Boundary data for an obstacle run.
///
/// Textual forms: `zero`, `radial:r0=<v>`, `halfspace:gamma=<v>,angle=<radians>`,
/// or a path to a CSV snapshot with header `x,y,u[,active]`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData {
    Zero,
    Radial { r0: f64 },
    Halfspace { gamma: f64, angle: f64 },
    File(PathBuf),
}

impl BoundaryData {
    /// Samples the data on every node of `grid`.
    ///
    /// Only the frozen outer rings are used by the solver; for file data the
    /// snapshot must live on the same grid.
    pub fn field(&self, grid: Grid2) -> Result<ScalarField, BoundaryError> {
        match self {
            BoundaryData::Zero => Ok(ScalarField::zeros(grid)),
            BoundaryData::Radial { r0 } => {
                let r0 = *r0;
                Ok(ScalarField::from_fn(grid, |p| radial_oracle(r0, p)))
            }
            BoundaryData::Halfspace { gamma, angle } => {
                let (g, a) = (*gamma, *angle);
                Ok(ScalarField::from_fn(grid, |p| halfspace_oracle(g, a, p)))
            }
            BoundaryData::File(path) => {
                let snap = snapshot::read_field_csv(path)?;
                if snap.0.grid() != &grid {
                    return Err(SnapshotError::Schema(format!(
                        "boundary file {} is on a different grid",
                        path.display()
                    ))
                    .into());
                }
                Ok(snap.0)
            }
        }
    }

    /// The exact continuum solution for Laplace, when one is known.
    pub fn exact_laplace_solution(&self) -> Option<Box<dyn Fn(Point) -> f64>> {
        match *self {
            BoundaryData::Zero => Some(Box::new(|_| 0.0)),
            BoundaryData::Radial { r0 } => Some(Box::new(move |p| radial_oracle(r0, p))),
            BoundaryData::Halfspace { gamma, angle } if gamma == 1.0 => {
                Some(Box::new(move |p| halfspace_oracle(gamma, angle, p)))
            }
            _ => None,
        }
    }
}

fn parse_params(descriptor: &str, body: &str) -> Result<Vec<(String, f64)>, BoundaryError> {
    body.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| BoundaryError::BadParameter {
                descriptor: descriptor.to_string(),
                reason: format!("expected key=value, got `{kv}`"),
            })?;
            let v: f64 = v.trim().parse().map_err(|_| BoundaryError::BadParameter {
                descriptor: descriptor.to_string(),
                reason: format!("`{v}` is not a number"),
            })?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

impl FromStr for BoundaryData {
    type Err = BoundaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "zero" {
            return Ok(BoundaryData::Zero);
        }
        let bad = |reason: &str| BoundaryError::BadParameter {
            descriptor: s.to_string(),
            reason: reason.to_string(),
        };
        if let Some(body) = s.strip_prefix("radial:") {
            let params = parse_params(s, body)?;
            return match params.as_slice() {
                [(k, r0)] if k == "r0" && *r0 > 0.0 => Ok(BoundaryData::Radial { r0: *r0 }),
                _ => Err(bad("expected r0=<positive value>")),
            };
        }
        if let Some(body) = s.strip_prefix("halfspace:") {
            let mut gamma = None;
            let mut angle = None;
            for (k, v) in parse_params(s, body)? {
                match k.as_str() {
                    "gamma" => gamma = Some(v),
                    "angle" => angle = Some(v),
                    _ => return Err(bad(&format!("unknown key `{k}`"))),
                }
            }
            return match (gamma, angle) {
                (Some(gamma), Some(angle)) if gamma > 0.0 && angle.is_finite() => {
                    Ok(BoundaryData::Halfspace { gamma, angle })
                }
                _ => Err(bad("expected gamma=<positive>,angle=<radians>")),
            };
        }
        if s.ends_with(".csv") || Path::new(s).exists() {
            return Ok(BoundaryData::File(PathBuf::from(s)));
        }
        Err(BoundaryError::Unrecognized(s.to_string()))
    }
}

impl fmt::Display for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Zero => write!(f, "zero"),
            BoundaryData::Radial { r0 } => write!(f, "radial:r0={r0}"),
            BoundaryData::Halfspace { gamma, angle } => {
                write!(f, "halfspace:gamma={gamma},angle={angle}")
            }
            BoundaryData::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for BoundaryData {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoundaryData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_values() {
        assert_eq!(radial_oracle(0.5, [0.5, 0.0]), 0.0);
        assert_eq!(radial_oracle(0.5, [0.25, 0.0]), 0.0);
        // frozen from exact evaluation: 0.75²/4 − 1/16 − ln(1.5)/8
        let v = radial_oracle(0.5, [0.75, 0.0]);
        assert!((v - 0.027_441_861_486_479_452).abs() < 1e-15);
        assert_eq!(radial_oracle_hessian_norm(0.5, 0.5), 1.0);
    }

    #[test]
    fn radial_satisfies_pde() {
        // finite-difference Laplacian of the closed form in the annulus
        let h = 1e-4;
        for p in [[0.7, 0.1], [-0.3, 0.6], [0.2, -0.9]] {
            let u = |x: f64, y: f64| radial_oracle(0.5, [x, y]);
            let lap = (u(p[0] + h, p[1]) + u(p[0] - h, p[1]) + u(p[0], p[1] + h)
                + u(p[0], p[1] - h)
                - 4.0 * u(p[0], p[1]))
                / (h * h);
            assert!((lap - 1.0).abs() < 1e-5, "{lap}");
        }
    }

    #[test]
    fn descriptor_parsing() {
        assert_eq!("zero".parse::<BoundaryData>().unwrap(), BoundaryData::Zero);
        assert_eq!(
            "radial:r0=0.5".parse::<BoundaryData>().unwrap(),
            BoundaryData::Radial { r0: 0.5 }
        );
        assert_eq!(
            "halfspace:gamma=1,angle=0.25".parse::<BoundaryData>().unwrap(),
            BoundaryData::Halfspace {
                gamma: 1.0,
                angle: 0.25
            }
        );
        assert_eq!(
            "data/b.csv".parse::<BoundaryData>().unwrap(),
            BoundaryData::File(PathBuf::from("data/b.csv"))
        );
        assert!("radial:r0=-1".parse::<BoundaryData>().is_err());
        assert!("radial:x=1".parse::<BoundaryData>().is_err());
        assert!("halfspace:gamma=1".parse::<BoundaryData>().is_err());
        assert!("spiral".parse::<BoundaryData>().is_err());
        let d = BoundaryData::Halfspace {
            gamma: 0.5,
            angle: 1.25,
        };
        assert_eq!(d.to_string().parse::<BoundaryData>().unwrap(), d);
    }
}
