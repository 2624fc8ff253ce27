//! Admissible fully nonlinear operators `F` acting on symmetric matrices.
//!
//! The catalog is closed: Laplace, the two extremal Pucci operators and a
//! convex Bellman family `F(M) = max_N trace(N M)` over a finite set of
//! uniformly elliptic coefficient matrices. Every member satisfies
//! `F(0) = 0`, is uniformly elliptic with the recorded constants, and is
//! either convex or concave.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::OperatorError;

/// Absolute tolerance on `F(P) = 1` for the two algebraic solves.
pub const LEVEL_SET_TOL: f64 = 1e-12;

/// A symmetric `n x n` matrix with `n` in `{1, 2}`.
///
/// Only the upper triangle is stored so symmetry holds by construction.
/// For `dim == 1` the `a12` and `a22` slots are zero and unused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat {
    dim: usize,
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

/// Eigen-decomposition of a [`SymMat`]; values ascending, vectors matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen {
    pub values: [f64; 2],
    pub vectors: [[f64; 2]; 2],
    pub dim: usize,
}

impl Eigen {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.dim]
    }
}

impl SymMat {
    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self {
            dim: 2,
            a11,
            a12,
            a22,
        }
    }

    /// A `1 x 1` matrix.
    pub const fn scalar(a: f64) -> Self {
        Self {
            dim: 1,
            a11: a,
            a12: 0.0,
            a22: 0.0,
        }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Self::new(d1, 0.0, d2)
    }

    pub const fn zero(dim: usize) -> Self {
        if dim == 1 {
            Self::scalar(0.0)
        } else {
            Self::new(0.0, 0.0, 0.0)
        }
    }

    pub const fn identity(dim: usize) -> Self {
        if dim == 1 {
            Self::scalar(1.0)
        } else {
            Self::new(1.0, 0.0, 1.0)
        }
    }

    /// `e ⊗ e` for a vector in the plane.
    pub fn outer(e: [f64; 2]) -> Self {
        Self::new(e[0] * e[0], e[0] * e[1], e[1] * e[1])
    }

    /// `R diag(d1, d2) Rᵀ` with `R` the rotation by `angle`.
    pub fn rotated_diag(d1: f64, d2: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::outer([c, s]) * d1 + Self::outer([-s, c]) * d2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> f64 {
        if self.dim == 1 {
            self.a11
        } else {
            self.a11 + self.a22
        }
    }

    /// `trace(self * other)`.
    pub fn trace_product(&self, other: &SymMat) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in trace product");
        if self.dim == 1 {
            self.a11 * other.a11
        } else {
            self.a11 * other.a11 + 2.0 * self.a12 * other.a12 + self.a22 * other.a22
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.trace_product(self).sqrt()
    }

    /// `⟨self v, v⟩`.
    pub fn quadratic_form(&self, v: [f64; 2]) -> f64 {
        if self.dim == 1 {
            self.a11 * v[0] * v[0]
        } else {
            self.a11 * v[0] * v[0] + 2.0 * self.a12 * v[0] * v[1] + self.a22 * v[1] * v[1]
        }
    }

    /// Closed-form eigen-decomposition.
    pub fn eigen(&self) -> Eigen {
        if self.dim == 1 {
            return Eigen {
                values: [self.a11, 0.0],
                vectors: [[1.0, 0.0], [0.0, 1.0]],
                dim: 1,
            };
        }
        let mean = 0.5 * (self.a11 + self.a22);
        let half_diff = 0.5 * (self.a11 - self.a22);
        let radius = half_diff.hypot(self.a12);
        let angle = 0.5 * self.a12.atan2(half_diff);
        let (s, c) = angle.sin_cos();
        Eigen {
            values: [mean - radius, mean + radius],
            vectors: [[-s, c], [c, s]],
            dim: 2,
        }
    }

    fn eigen_split(&self) -> (f64, f64) {
        let eig = self.eigen();
        eig.values().iter().fold((0.0, 0.0), |(pos, neg), &v| {
            if v > 0.0 {
                (pos + v, neg)
            } else {
                (pos, neg + v)
            }
        })
    }
}

impl Add for SymMat {
    type Output = SymMat;
    fn add(self, rhs: SymMat) -> SymMat {
        assert_eq!(self.dim, rhs.dim);
        SymMat {
            dim: self.dim,
            a11: self.a11 + rhs.a11,
            a12: self.a12 + rhs.a12,
            a22: self.a22 + rhs.a22,
        }
    }
}

impl Sub for SymMat {
    type Output = SymMat;
    fn sub(self, rhs: SymMat) -> SymMat {
        self + (-rhs)
    }
}

impl Neg for SymMat {
    type Output = SymMat;
    fn neg(self) -> SymMat {
        self * -1.0
    }
}

impl Mul<f64> for SymMat {
    type Output = SymMat;
    fn mul(self, t: f64) -> SymMat {
        SymMat {
            dim: self.dim,
            a11: self.a11 * t,
            a12: self.a12 * t,
            a22: self.a22 * t,
        }
    }
}

impl fmt::Display for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "[{}]", self.a11)
        } else {
            write!(f, "[{}, {}; {}, {}]", self.a11, self.a12, self.a12, self.a22)
        }
    }
}

// Serialized as `[a11]` or `[a11, a12, a22]`.
impl Serialize for SymMat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.dim == 1 {
            [self.a11].serialize(s)
        } else {
            [self.a11, self.a12, self.a22].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for SymMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        match v.as_slice() {
            [a] => Ok(SymMat::scalar(*a)),
            [a11, a12, a22] => Ok(SymMat::new(*a11, *a12, *a22)),
            _ => Err(serde::de::Error::custom(
                "symmetric matrix must be [a11] or [a11, a12, a22]",
            )),
        }
    }
}

/// Ellipticity constants `0 < lambda0 <= lambda1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticityPair {
    lambda0: f64,
    lambda1: f64,
}

impl EllipticityPair {
    pub fn new(lambda0: f64, lambda1: f64) -> Result<Self, OperatorError> {
        if !(lambda0 > 0.0 && lambda0 <= lambda1 && lambda1.is_finite()) {
            return Err(OperatorError::InvalidEllipticity { lambda0, lambda1 });
        }
        Ok(Self { lambda0, lambda1 })
    }

    pub fn unit() -> Self {
        Self {
            lambda0: 1.0,
            lambda1: 1.0,
        }
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
}

/// `P⁻(M) = inf { trace(N M) : λ₀ Id ≤ N ≤ λ₁ Id }`.
pub fn pucci_minus(m: &SymMat, ell: &EllipticityPair) -> f64 {
    let (pos, neg) = m.eigen_split();
    ell.lambda0 * pos + ell.lambda1 * neg
}

/// `P⁺(M) = sup { trace(N M) : λ₀ Id ≤ N ≤ λ₁ Id }`.
pub fn pucci_plus(m: &SymMat, ell: &EllipticityPair) -> f64 {
    let (pos, neg) = m.eigen_split();
    ell.lambda1 * pos + ell.lambda0 * neg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Laplace,
    PucciPlus,
    PucciMinus,
    BellmanFamily,
}

/// A validated member of the operator catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperatorSpec", into = "RawOperatorSpec")]
pub struct OperatorSpec {
    kind: OperatorKind,
    ellipticity: EllipticityPair,
    family: Vec<SymMat>,
}

#[derive(Serialize, Deserialize)]
struct RawOperatorSpec {
    kind: OperatorKind,
    lambda0: f64,
    lambda1: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    family: Vec<SymMat>,
}

impl TryFrom<RawOperatorSpec> for OperatorSpec {
    type Error = OperatorError;
    fn try_from(raw: RawOperatorSpec) -> Result<Self, Self::Error> {
        let ell = EllipticityPair::new(raw.lambda0, raw.lambda1)?;
        match raw.kind {
            OperatorKind::BellmanFamily => Self::bellman(raw.family, ell),
            kind if raw.family.is_empty() => Self::extremal(kind, ell),
            _ => Err(OperatorError::UnexpectedFamily),
        }
    }
}

impl From<OperatorSpec> for RawOperatorSpec {
    fn from(spec: OperatorSpec) -> Self {
        RawOperatorSpec {
            kind: spec.kind,
            lambda0: spec.ellipticity.lambda0,
            lambda1: spec.ellipticity.lambda1,
            family: spec.family,
        }
    }
}

impl OperatorSpec {
    pub fn laplace() -> Self {
        Self {
            kind: OperatorKind::Laplace,
            ellipticity: EllipticityPair::unit(),
            family: Vec::new(),
        }
    }

    pub fn pucci_plus(ell: EllipticityPair) -> Self {
        Self {
            kind: OperatorKind::PucciPlus,
            ellipticity: ell,
            family: Vec::new(),
        }
    }

    pub fn pucci_minus(ell: EllipticityPair) -> Self {
        Self {
            kind: OperatorKind::PucciMinus,
            ellipticity: ell,
            family: Vec::new(),
        }
    }

    fn extremal(kind: OperatorKind, ell: EllipticityPair) -> Result<Self, OperatorError> {
        match kind {
            OperatorKind::Laplace => {
                // trace is elliptic with constants (1, 1); any enclosing pair is admissible
                if ell.lambda0 > 1.0 || ell.lambda1 < 1.0 {
                    return Err(OperatorError::LaplaceEllipticity {
                        lambda0: ell.lambda0,
                        lambda1: ell.lambda1,
                    });
                }
                Ok(Self {
                    kind,
                    ellipticity: ell,
                    family: Vec::new(),
                })
            }
            OperatorKind::PucciPlus => Ok(Self::pucci_plus(ell)),
            OperatorKind::PucciMinus => Ok(Self::pucci_minus(ell)),
            OperatorKind::BellmanFamily => Err(OperatorError::EmptyFamily),
        }
    }

    /// `F(M) = max_N trace(N M)`; every member must satisfy `λ₀ Id ≤ N ≤ λ₁ Id`.
    pub fn bellman(family: Vec<SymMat>, ell: EllipticityPair) -> Result<Self, OperatorError> {
        if family.is_empty() {
            return Err(OperatorError::EmptyFamily);
        }
        let slack = 1e-12 * ell.lambda1;
        for (index, member) in family.iter().enumerate() {
            let eig = member.eigen();
            let vals = eig.values();
            let lo = vals[0];
            let hi = vals[vals.len() - 1];
            if lo < ell.lambda0 - slack || hi > ell.lambda1 + slack {
                return Err(OperatorError::MemberOutOfRange { index, lo, hi });
            }
        }
        Ok(Self {
            kind: OperatorKind::BellmanFamily,
            ellipticity: ell,
            family,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn ellipticity(&self) -> EllipticityPair {
        self.ellipticity
    }

    pub fn family(&self) -> &[SymMat] {
        &self.family
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, OperatorKind::PucciMinus)
    }

    /// Evaluates `F(M)`.
    pub fn eval(&self, m: &SymMat) -> f64 {
        match self.kind {
            OperatorKind::Laplace => m.trace(),
            OperatorKind::PucciPlus => pucci_plus(m, &self.ellipticity),
            OperatorKind::PucciMinus => pucci_minus(m, &self.ellipticity),
            OperatorKind::BellmanFamily => self
                .family
                .iter()
                .map(|n| n.trace_product(m))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Coefficient matrix `A` of the linearization at `M`, so that
    /// `F(M) = trace(A M)` and `λ₀ Id ≤ A ≤ λ₁ Id`.
    ///
    /// This is the optimal control of the Bellman/Isaacs representation:
    /// the maximizing member, or the Pucci weights placed on the eigenframe of `M`.
    pub fn linearization(&self, m: &SymMat) -> SymMat {
        let ell = &self.ellipticity;
        match self.kind {
            OperatorKind::Laplace => SymMat::identity(m.dim()),
            OperatorKind::PucciPlus | OperatorKind::PucciMinus => {
                let (on_pos, on_neg) = if self.kind == OperatorKind::PucciPlus {
                    (ell.lambda1, ell.lambda0)
                } else {
                    (ell.lambda0, ell.lambda1)
                };
                let eig = m.eigen();
                if m.dim() == 1 {
                    let w = if eig.values[0] > 0.0 { on_pos } else { on_neg };
                    return SymMat::scalar(w);
                }
                let weight = |v: f64| if v > 0.0 { on_pos } else { on_neg };
                SymMat::outer(eig.vectors[0]) * weight(eig.values[0])
                    + SymMat::outer(eig.vectors[1]) * weight(eig.values[1])
            }
            OperatorKind::BellmanFamily => {
                let mut best = self.family[0];
                let mut best_val = best.trace_product(m);
                for n in &self.family[1..] {
                    let v = n.trace_product(m);
                    if v > best_val {
                        best = *n;
                        best_val = v;
                    }
                }
                best
            }
        }
    }
}

/// Evaluates `spec` at `m`.
pub fn eval_operator(spec: &OperatorSpec, m: &SymMat) -> f64 {
    spec.eval(m)
}

/// Bisection for an increasing `g` on `[lo, hi]` with `g(lo) <= target <= g(hi)`.
fn bisect_increasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let val = g(mid);
        if (val - target).abs() <= 0.25 * LEVEL_SET_TOL {
            return mid;
        }
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    mid
}

/// The `γ > 0` with `F(γ e ⊗ e) = 1`.
///
/// `γ ↦ F(γ e⊗e)` has slope at least `λ₀`, so bisection on
/// `[1/(2λ₁), 2/λ₀]` converges whenever the operator is admissible.
pub fn gamma_for_direction(spec: &OperatorSpec, e: [f64; 2]) -> Result<f64, OperatorError> {
    let norm = e[0].hypot(e[1]);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(OperatorError::NotUnitVector { norm });
    }
    let ell = spec.ellipticity();
    let ee = SymMat::outer(e);
    let g = |gamma: f64| spec.eval(&(ee * gamma));
    let lo = 0.5 / ell.lambda1;
    let hi = 2.0 / ell.lambda0;
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo <= 1.0 && g_hi >= 1.0) {
        return Err(OperatorError::NoBracket { lo: g_lo, hi: g_hi });
    }
    Ok(bisect_increasing(g, lo, hi, 1.0))
}

/// Shifts `q` along the identity onto `{F = 1}`: returns `(β, q + β Id)`.
///
/// `β ↦ F(q + β Id)` is increasing with slope in `[nλ₀, nλ₁]`, which
/// brackets `β` explicitly from `F(q)`.
pub fn project_to_level_set(spec: &OperatorSpec, q: &SymMat) -> (f64, SymMat) {
    let n = q.dim() as f64;
    let ell = spec.ellipticity();
    let id = SymMat::identity(q.dim());
    let g = |beta: f64| spec.eval(&(*q + id * beta));
    let gap = 1.0 - g(0.0);
    if gap == 0.0 {
        return (0.0, *q);
    }
    let (a, b) = (gap / (n * ell.lambda1), gap / (n * ell.lambda0));
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let pad = 1e-9 * (1.0 + hi.abs());
    let beta = bisect_increasing(g, lo - pad, hi + pad, 1.0);
    (beta, *q + id * beta)
}
