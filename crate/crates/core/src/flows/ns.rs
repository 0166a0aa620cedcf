//! Mild solutions of the unforced and forced Navier-Stokes equations.

use super::config::SolverConfig;
use super::engine::{advection, require_initial_velocity, Engine};
use super::solution::{ForcedObservables, MildSolution};
use super::steady::solve_steady_state;
use crate::besov::mixed_space_norm;
use crate::error::{CsnsError, Result};
use crate::spectral::{ForceSpec, SpectralField};

/// Integrability used for the `L^{p:inf}_p` distance to the steady state.
pub const DEFAULT_OBSERVABLE_P: f64 = 4.0;

pub fn solve_ns(u0: &SpectralField, cfg: &SolverConfig) -> Result<MildSolution> {
    require_initial_velocity(u0)?;
    let rhs = |_t: f64, u: &SpectralField| advection(u);
    Engine::new(u0.grid(), cfg, None, &rhs)?.run(u0)
}

/// Forced run with `U_f` computed on the fly (tolerance `1e-13`).
pub fn solve_nsf(u0: &SpectralField, f: &ForceSpec, cfg: &SolverConfig) -> Result<MildSolution> {
    let steady = if f.is_zero() {
        SpectralField::zeros(u0.grid(), 3)
    } else {
        solve_steady_state(f, 1e-13)?
    };
    solve_nsf_with_steady(u0, f, &steady, DEFAULT_OBSERVABLE_P, cfg)
}

/// Forced run against a precomputed steady state `U_f`; `p` selects the
/// `L^{p:inf}_p` observable.
pub fn solve_nsf_with_steady(
    u0: &SpectralField,
    f: &ForceSpec,
    steady: &SpectralField,
    p: f64,
    cfg: &SolverConfig,
) -> Result<MildSolution> {
    require_initial_velocity(u0)?;
    u0.check_same_grid(f.potential())?;
    u0.check_same_grid(steady)?;
    if !(p > 3.0 && p < 5.0) {
        return Err(CsnsError::Precondition(format!(
            "forced observable needs 3 < p < 5, got {p}"
        )));
    }
    let rhs = |_t: f64, u: &SpectralField| advection(u);
    let forcing = if f.is_zero() { None } else { Some(f.force()) };
    let mut sol = Engine::new(u0.grid(), cfg, forcing, &rhs)?.run(u0)?;
    let sup_l3 = sol.diagnostics.iter().map(|d| d.l3).fold(0.0, f64::max);
    let distance_to_steady = if sol.trajectory.len() >= 2 {
        let diff = sol.trajectory.map(|u| u.sub(steady))?;
        mixed_space_norm(&diff, p, f64::INFINITY, p)?
    } else {
        f64::NAN
    };
    sol.forced = Some(ForcedObservables {
        sup_l3,
        p,
        distance_to_steady,
    });
    Ok(sol)
}
