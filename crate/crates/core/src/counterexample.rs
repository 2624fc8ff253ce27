//! One-dimensional `u'' = χ_Ω` with `Ω` a union of intervals accumulating at 0.
//!
//! With sparse enough intervals `u(r) = o(r²)`, so quadratic non-degeneracy
//! fails. Everything here is exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::FamilyError;

/// Default truncation depth of the geometric family.
pub const DEFAULT_DEPTH: u32 = 12;

/// Disjoint open intervals `(a_j, b_j)`, ordered so that `b_{j+1} ≤ a_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalFamily {
    intervals: Vec<(BigRational, BigRational)>,
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `base^{-k}` as a rational.
fn inv_pow(base: u32, k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(base).pow(k))
}

impl IntervalFamily {
    pub fn new(intervals: Vec<(BigRational, BigRational)>) -> Result<Self, FamilyError> {
        for (j, (a, b)) in intervals.iter().enumerate() {
            if !(a.is_positive() && a < b) {
                return Err(FamilyError::BadInterval(j));
            }
        }
        for (j, pair) in intervals.windows(2).enumerate() {
            if pair[1].1 > pair[0].0 {
                return Err(FamilyError::NotDisjoint(j, j + 1));
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    /// `(4^{-j}, 4^{-j} + 8^{-j})` for `j = 1..=depth`.
    pub fn geometric(depth: u32) -> Self {
        let intervals = (1..=depth)
            .map(|j| {
                let a = inv_pow(4, j);
                let b = &a + inv_pow(8, j);
                (a, b)
            })
            .collect();
        Self { intervals }
    }

    /// Parses `[[[a_num, a_den], [b_num, b_den]], ...]`.
    pub fn from_json(text: &str) -> Result<Self, FamilyError> {
        let raw: Vec<[[i64; 2]; 2]> = serde_json::from_str(text)?;
        let mut intervals = Vec::with_capacity(raw.len());
        for (j, [[an, ad], [bn, bd]]) in raw.into_iter().enumerate() {
            if ad == 0 || bd == 0 {
                return Err(FamilyError::ZeroDenominator(j));
            }
            intervals.push((ratio(an, ad), ratio(bn, bd)));
        }
        Self::new(intervals)
    }

    pub fn intervals(&self) -> &[(BigRational, BigRational)] {
        &self.intervals
    }

    /// `|Ω ∩ (0, r)|`.
    pub fn measure_below(&self, r: &BigRational) -> BigRational {
        self.intervals
            .iter()
            .filter(|(a, _)| a < r)
            .map(|(a, b)| b.min(r).clone() - a)
            .fold(BigRational::zero(), |acc, m| acc + m)
    }
}

/// `|Ω ∩ (0, r)| / r`.
///
/// The symmetric density `|Ω ∩ (−r, r)| / 2r` of the evenly reflected set is the same number.
pub fn density(family: &IntervalFamily, r: &BigRational) -> BigRational {
    family.measure_below(r) / r
}

/// `u(t) = ∫₀ᵗ∫₀ˢ χ_Ω = ∫₀ᵗ (t − τ) χ_Ω(τ) dτ`.
pub fn u_value(family: &IntervalFamily, t: &BigRational) -> BigRational {
    let two = ratio(2, 1);
    family
        .intervals
        .iter()
        .filter(|(a, _)| a < t)
        .map(|(a, b)| {
            let c = b.min(t);
            // ∫_a^c (t − τ) dτ = t (c − a) − (c² − a²) / 2
            t * (c - a) - (c * c - a * a) / &two
        })
        .fold(BigRational::zero(), |acc, v| acc + v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayRow {
    #[serde(serialize_with = "ser_ratio")]
    pub r: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub u_over_r2: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub density: BigRational,
    /// `u(r)/r² ≤ density(r)`.
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub ratio_strictly_decreasing: bool,
    pub density_strictly_decreasing: bool,
    pub all_bounded: bool,
}

/// `"p/q"` even for integers.
pub fn fmt_ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn ser_ratio<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_ratio(q))
}

/// The ratio table along decreasing radii.
pub fn verify_o_r2(family: &IntervalFamily, radii: &[BigRational]) -> DecayReport {
    let rows: Vec<DecayRow> = radii
        .iter()
        .map(|r| {
            let u_over_r2 = u_value(family, r) / (r * r);
            let density = density(family, r);
            DecayRow {
                bounded: u_over_r2 <= density,
                r: r.clone(),
                u_over_r2,
                density,
            }
        })
        .collect();
    let strictly = |f: fn(&DecayRow) -> &BigRational| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    DecayReport {
        ratio_strictly_decreasing: strictly(|r| &r.u_over_r2),
        density_strictly_decreasing: strictly(|r| &r.density),
        all_bounded: rows.iter().all(|r| r.bounded),
        rows,
    }
}

/// `4^{-k}` for `k` in `ks`.
pub fn quarter_powers(ks: impl IntoIterator<Item = u32>) -> Vec<BigRational> {
    ks.into_iter().map(|k| inv_pow(4, k)).collect()
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<BigInt>().ok()?, q.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if q.is_zero() {
        return None;
    }
    Some(BigRational::new(p, q))
}
