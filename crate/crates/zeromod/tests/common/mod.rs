//! Shared fixtures for the integration suites: demo systems, the seeded
//! batch of random minimal observable systems, and small numeric helpers.

#![allow(dead_code)] // each test binary uses its own subset of these fixtures

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use zeromod::inner::{squaring, Factorization};
use zeromod::matrix::{cr, Matrix, Tolerance};
use zeromod::sample::{random_system, Rng, SystemSpec};
use zeromod::ss::StateSpace;
use zeromod::zeros::{zero_report, ZeroReport};

pub fn tol() -> Tolerance {
    Tolerance::default()
}

/// `(z-1)/(z+1)`.
pub fn scalar_example() -> StateSpace {
    StateSpace::siso(-1.0, 1.0, -2.0, 1.0)
}

/// `[1, 1/(z+1)]`.
pub fn row_example() -> StateSpace {
    StateSpace::new(
        Matrix::from_real(&[vec![-1.0]]),
        Matrix::from_real(&[vec![0.0, 1.0]]),
        Matrix::from_real(&[vec![1.0]]),
        Matrix::from_real(&[vec![1.0, 0.0]]),
    )
    .unwrap()
}

pub struct Case {
    pub ss: StateSpace,
    pub report: ZeroReport,
}

pub struct Batch {
    pub cases: Vec<Case>,
    pub build_time: Duration,
}

static BATCH: OnceLock<Batch> = OnceLock::new();

/// 200 seeded random minimal observable systems (n <= 8, p, q <= 4,
/// rank-deficient D included; every other one has a stable A) with their
/// zero reports.
pub fn batch() -> &'static Batch {
    BATCH.get_or_init(|| {
        let start = Instant::now();
        let tol = tol();
        let mut rng = Rng::new(2024);
        let mut cases = Vec::with_capacity(200);
        for k in 0..200 {
            let spec = SystemSpec {
                stable: k % 2 == 0,
                ..SystemSpec::default()
            };
            let ss = random_system(&mut rng, &spec, &tol);
            let report = zero_report(&ss, &tol, false).expect("batch system analyzable");
            cases.push(Case { ss, report });
        }
        Batch {
            cases,
            build_time: start.elapsed(),
        }
    })
}

static FACTORIZATIONS: OnceLock<Vec<Factorization>> = OnceLock::new();

/// Squarings of every batch system (no stated runtime bound; shared by the
/// certificate, reconstruction and subspace-identity criteria).
pub fn factorizations() -> &'static [Factorization] {
    FACTORIZATIONS.get_or_init(|| {
        let tol = tol();
        batch()
            .cases
            .iter()
            .map(|case| squaring(&case.ss, &tol).expect("batch system factorizable"))
            .collect()
    })
}

/// Coefficients of prod (z - r_i), highest degree first.
pub fn char_poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![cr(1.0)];
    for &r in roots {
        let mut next = vec![cr(0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    coeffs
}

pub fn print_line(name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {name}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
