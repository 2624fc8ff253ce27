//! Seeded randomized checks of the operator catalog's structural properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::operators::{
    gamma_for_direction, project_to_level_set, pucci_minus, pucci_plus, EllipticityPair,
    OperatorSpec, SymMat,
};

/// Tolerance on every property and worked case.
pub const PROPERTY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyTally {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// Largest amount by which the inequality (or equality) was violated.
    pub worst_violation: f64,
}

impl PropertyTally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            failures: 0,
            worst_violation: 0.0,
        }
    }

    /// Records `violation`, which is `≤ 0` when the property holds exactly.
    fn record(&mut self, violation: f64) {
        self.checked += 1;
        self.worst_violation = self.worst_violation.max(violation);
        if violation > PROPERTY_TOL {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkedCase {
    pub name: &'static str,
    pub got: f64,
    pub expected: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropsReport {
    pub seed: u64,
    pub samples: usize,
    pub properties: Vec<PropertyTally>,
    pub worked_cases: Vec<WorkedCase>,
}

impl PropsReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyTally::passed) && self.worked_cases.iter().all(|c| c.pass)
    }
}

fn random_sym(rng: &mut ChaCha8Rng) -> SymMat {
    SymMat::new(
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
    )
}

/// The catalog instances exercised by the suite, all with `(λ₀, λ₁) = (1, 2)`
/// except Laplace.
pub fn catalog() -> Vec<OperatorSpec> {
    let ell = EllipticityPair::new(1.0, 2.0).expect("valid");
    let family = vec![
        SymMat::diag(1.0, 2.0),
        SymMat::diag(2.0, 1.0),
        SymMat::rotated_diag(1.0, 2.0, 0.7),
        SymMat::identity(2) * 1.5,
    ];
    vec![
        OperatorSpec::laplace(),
        OperatorSpec::pucci_plus(ell),
        OperatorSpec::pucci_minus(ell),
        OperatorSpec::bellman(family, ell).expect("valid family"),
    ]
}

fn worked(name: &'static str, got: f64, expected: f64) -> WorkedCase {
    WorkedCase {
        name,
        got,
        expected,
        pass: (got - expected).abs() <= PROPERTY_TOL,
    }
}

fn worked_cases() -> Vec<WorkedCase> {
    let ell = EllipticityPair::new(1.0, 2.0).expect("valid");
    let lap = OperatorSpec::laplace();
    let plus = OperatorSpec::pucci_plus(ell);
    let d = std::f64::consts::FRAC_1_SQRT_2;
    let gamma = |spec: &OperatorSpec, e| gamma_for_direction(spec, e).unwrap_or(f64::NAN);
    vec![
        worked("gamma laplace e1", gamma(&lap, [1.0, 0.0]), 1.0),
        worked("gamma pucci+ e1", gamma(&plus, [1.0, 0.0]), 0.5),
        worked("gamma pucci+ diagonal", gamma(&plus, [d, d]), 0.5),
        worked("project laplace 0", project_to_level_set(&lap, &SymMat::zero(2)).0, 0.5),
        worked("project laplace diag(3,0)", project_to_level_set(&lap, &SymMat::diag(3.0, 0.0)).0, -1.0),
        worked("project pucci+ 0", project_to_level_set(&plus, &SymMat::zero(2)).0, 0.25),
    ]
}

/// Runs sandwich, duality, homogeneity, Lipschitz and γ-range checks on
/// `samples` random matrix pairs per catalog operator.
pub fn run_property_suite(seed: u64, samples: usize) -> PropsReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sandwich = PropertyTally::new("sandwich");
    let mut duality = PropertyTally::new("duality");
    let mut homogeneity = PropertyTally::new("homogeneity");
    let mut lipschitz = PropertyTally::new("lipschitz");
    let mut gamma_range = PropertyTally::new("gamma_range");
    let mut level_set = PropertyTally::new("level_set");
    let ops = catalog();
    let n = 2.0_f64;

    for _ in 0..samples {
        let p = random_sym(&mut rng);
        let q = random_sym(&mut rng);
        let t: f64 = rng.random_range(0.0..10.0);
        let ell = EllipticityPair::new(1.0, 2.0).expect("valid");

        duality.record((pucci_minus(&-p, &ell) + pucci_plus(&p, &ell)).abs());
        homogeneity.record((pucci_plus(&(p * t), &ell) - t * pucci_plus(&p, &ell)).abs());

        for op in &ops {
            let ell = op.ellipticity();
            let diff = q - p;
            let df = op.eval(&q) - op.eval(&p);
            let lo = pucci_minus(&diff, &ell);
            let hi = pucci_plus(&diff, &ell);
            sandwich.record((lo - df).max(df - hi));
            lipschitz.record(df.abs() - ell.lambda1() * n.sqrt() * diff.frobenius());
        }

        let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let e = [angle.cos(), angle.sin()];
        for op in &ops {
            let ell = op.ellipticity();
            match gamma_for_direction(op, e) {
                Ok(g) => gamma_range.record((1.0 / ell.lambda1() - g).max(g - 1.0 / ell.lambda0())),
                Err(_) => gamma_range.record(f64::INFINITY),
            }
            let (_, proj) = project_to_level_set(op, &p);
            level_set.record((op.eval(&proj) - 1.0).abs());
        }
    }

    PropsReport {
        seed,
        samples,
        properties: vec![sandwich, duality, homogeneity, lipschitz, gamma_range, level_set],
        worked_cases: worked_cases(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let rep = run_property_suite(7, 500);
        assert!(rep.passed(), "{rep:#?}");
        assert_eq!(rep.properties[0].checked, 500 * 4);
    }

    #[test]
    fn seed_determines_report() {
        assert_eq!(run_property_suite(3, 50), run_property_suite(3, 50));
    }
}
