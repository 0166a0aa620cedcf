//! Steady states `-Delta U + P div(U (x) U) = P f` by fixed-point iteration.

use serde::Serialize;

use super::engine::advection;
use crate::besov::lp_norm;
use crate::error::{CsnsError, Result};
use crate::spectral::{inverse_laplacian, laplacian, ForceSpec, SpectralField};

const MAX_ITERATIONS: usize = 500;
const STALL_LIMIT: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct SteadyReport {
    pub iterations: usize,
    pub last_increment: f64,
    /// `||U||_{L^3}` and the certificate bound `2 ||Delta^{-1} f||_{L^3}`.
    pub l3: f64,
    pub certificate_bound: f64,
    /// `||-Delta U + P div(U (x) U) - P f||_2`.
    pub residual_l2: f64,
    /// `L^3` increment of every iteration, starting with `||U^(1)||`.
    pub increments: Vec<f64>,
}

/// `U <- Delta^{-1} P div(U (x) U) - Delta^{-1} P f` from `U = 0` until the
/// `L^3` increment drops below `tol`.
pub fn solve_steady_state(f: &ForceSpec, tol: f64) -> Result<SpectralField> {
    solve_steady_state_with_report(f, tol).map(|(u, _)| u)
}

pub fn solve_steady_state_with_report(
    f: &ForceSpec,
    tol: f64,
) -> Result<(SpectralField, SteadyReport)> {
    if !(tol > 0.0) {
        return Err(CsnsError::Precondition(format!(
            "steady-state tolerance must be positive, got {tol}"
        )));
    }
    let g = f.potential();
    let mut u = SpectralField::zeros(g.grid(), 3);
    u.add_scaled(-1.0, g)?;
    let mut last = f64::INFINITY;
    let mut rising = 0;
    let mut iterations = 1;
    let mut increment = lp_norm(&u, 3.0)?;
    let mut increments = vec![increment];
    // The equation residual of the previous iterate is the Laplacian of the increment.
    let mut equation_residual = f64::INFINITY;
    while increment > tol || equation_residual > 10.0 * tol {
        if iterations >= MAX_ITERATIONS {
            return Err(CsnsError::ContractionFailure {
                iterations,
                last_increment: increment,
            });
        }
        // P div(U (x) U) = -advection(U).
        let flux = advection(&u)?.scale(-1.0);
        let mut next = inverse_laplacian(&flux)?;
        next.add_scaled(-1.0, g)?;
        next.set_divergence_free(true);
        let step = next.sub(&u)?;
        increment = lp_norm(&step, 3.0)?;
        increments.push(increment);
        equation_residual = laplacian(&step).l2_norm();
        iterations += 1;
        if !increment.is_finite() {
            return Err(CsnsError::ContractionFailure {
                iterations,
                last_increment: increment,
            });
        }
        rising = if increment >= last { rising + 1 } else { 0 };
        if rising >= STALL_LIMIT {
            return Err(CsnsError::ContractionFailure {
                iterations,
                last_increment: increment,
            });
        }
        last = increment;
        u = next;
    }
    let report = SteadyReport {
        iterations,
        last_increment: increment,
        l3: lp_norm(&u, 3.0)?,
        certificate_bound: 2.0 * f.l3_size(),
        residual_l2: steady_residual(&u, f)?,
        increments,
    };
    Ok((u, report))
}

/// `||-Delta U + P div(U (x) U) - P f||_2`.
pub fn steady_residual(u: &SpectralField, f: &ForceSpec) -> Result<f64> {
    let mut r = laplacian(u).scale(-1.0);
    r.add_scaled(-1.0, &advection(u)?)?;
    r.add_scaled(-1.0, &f.force())?;
    Ok(r.l2_norm())
}

/// Outcome of the admissibility bisection.
#[derive(Clone, Debug, Serialize)]
pub struct SteadyThreshold {
    /// Largest `||Delta^{-1} f||_{L^3}` found to converge.
    pub delta_num: f64,
    /// Smallest size found to fail.
    pub first_failure: Option<f64>,
    pub bisection_steps: usize,
}

/// Bisect the amplitude of `shape` between `lo` and `hi` (multiples of the
/// shape) for the boundary of steady-state convergence.
pub fn steady_state_threshold(
    shape: &ForceSpec,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: f64,
) -> Result<SteadyThreshold> {
    if !(0.0 < lo && lo < hi) || shape.is_zero() {
        return Err(CsnsError::Precondition(
            "threshold search needs 0 < lo < hi and a nonzero shape".into(),
        ));
    }
    let converges = |a: f64| solve_steady_state(&shape.scaled(a), tol).is_ok();
    if !converges(lo) {
        return Err(CsnsError::Precondition(format!(
            "steady iteration already fails at amplitude {lo}"
        )));
    }
    if converges(hi) {
        return Ok(SteadyThreshold {
            delta_num: hi * shape.l3_size(),
            first_failure: None,
            bisection_steps: 0,
        });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..steps {
        let mid = 0.5 * (a + b);
        if converges(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(SteadyThreshold {
        delta_num: a * shape.l3_size(),
        first_failure: Some(b * shape.l3_size()),
        bisection_steps: steps,
    })
}
