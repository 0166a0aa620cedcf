//! Perturbation system `w' - Delta w + Q(w, w)/2 + Q(w, g) + Q(w, U) = f_ext`.

use super::config::SolverConfig;
use super::engine::{require_initial_velocity, Engine};
use super::solution::MildSolution;
use crate::besov::{critical_chemin_lerner, Trajectory};
use crate::error::{CsnsError, Result};
use crate::spectral::{nonlinear_q, SpectralField};

/// Drift and source terms of the perturbation system. Missing entries are zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct PerturbationTerms<'a> {
    /// Time-dependent drift `g`, sampled by interpolation.
    pub drift: Option<&'a Trajectory>,
    /// Time-independent drift `U`.
    pub steady: Option<&'a SpectralField>,
    /// Time-dependent solenoidal source.
    pub source: Option<&'a Trajectory>,
}

#[derive(Clone, Debug)]
pub struct PerturbationSolution {
    pub solution: MildSolution,
    pub p: f64,
    /// `||w||` in `L^p_t B^{s_p + 2/p}_{p,p}` (Chemin-Lerner) over the run.
    pub w_norm: f64,
}

fn check_covers(tr: &Trajectory, t_end: f64, what: &str) -> Result<()> {
    let tol = 1e-12 * t_end.max(1.0);
    if tr.t_start() > tol || tr.t_end() < t_end - tol {
        return Err(CsnsError::Precondition(format!(
            "{what} covers [{}, {}] but the run needs [0, {t_end}]",
            tr.t_start(),
            tr.t_end()
        )));
    }
    Ok(())
}

pub fn solve_perturbation(
    w0: &SpectralField,
    terms: PerturbationTerms<'_>,
    p: f64,
    cfg: &SolverConfig,
) -> Result<PerturbationSolution> {
    require_initial_velocity(w0)?;
    if let Some(g) = terms.drift {
        w0.check_same_grid(g.first())?;
        check_covers(g, cfg.t_end, "drift")?;
    }
    if let Some(u) = terms.steady {
        w0.check_same_grid(u)?;
    }
    if let Some(f) = terms.source {
        w0.check_same_grid(f.first())?;
        check_covers(f, cfg.t_end, "source")?;
    }
    for (tr, what) in [(terms.drift, "drift"), (terms.source, "source")] {
        if tr.is_some_and(|t| t.ncomp() != 3) {
            return Err(CsnsError::Precondition(format!(
                "{what} needs 3 components"
            )));
        }
    }
    let steady = terms.steady.filter(|u| !u.is_zero());
    let drift = terms.drift.filter(|g| !g.is_zero());
    let source = terms.source.filter(|f| !f.is_zero());
    // Bilinearity: Q(w, w/2) + Q(w, g) + Q(w, U) = Q(w, w/2 + g + U).
    let rhs = |t: f64, w: &SpectralField| -> Result<SpectralField> {
        let mut partner = w.scale(0.5);
        if let Some(g) = drift {
            partner.add_scaled(1.0, &g.sample_at(t)?)?;
        }
        if let Some(u) = steady {
            partner.add_scaled(1.0, u)?;
        }
        let mut out = nonlinear_q(w, &partner)?.scale(-1.0);
        if let Some(f) = source {
            let ft = f.sample_at(t)?;
            out.add_scaled(1.0, &ft)?;
            out.set_divergence_free(ft.is_divergence_free());
        }
        Ok(out)
    };
    let solution = Engine::new(w0.grid(), cfg, None, &rhs)?.run(w0)?;
    let w_norm = if solution.trajectory.len() >= 2 {
        critical_chemin_lerner(&solution.trajectory, p, p, 2.0 / p)?
    } else {
        0.0
    };
    Ok(PerturbationSolution {
        solution,
        p,
        w_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::config::Stepper;
    use crate::flows::ns::{solve_ns, solve_nsf_with_steady};
    use crate::spectral::random::random_solenoidal;
    use crate::spectral::{ForceSpec, PeriodicGrid};
    use std::f64::consts::PI;

    fn grid() -> PeriodicGrid {
        PeriodicGrid::new(16, 2.0 * PI).unwrap()
    }

    #[test]
    fn zero_data_zero_solution() {
        let g = grid();
        let cfg = SolverConfig::new(0.01, 0.05, Stepper::PicardDuhamel);
        let out = solve_perturbation(
            &SpectralField::zeros(&g, 3),
            PerturbationTerms::default(),
            4.0,
            &cfg,
        )
        .unwrap();
        assert!(out.solution.trajectory.is_zero());
        assert_eq!(out.w_norm, 0.0);
    }

    #[test]
    fn without_drift_reduces_to_navier_stokes() {
        let g = grid();
        let w0 = random_solenoidal(&g, 4, 3, -1.0, 0.5);
        let cfg = SolverConfig::new(0.01, 0.1, Stepper::PicardDuhamel);
        let a = solve_perturbation(&w0, PerturbationTerms::default(), 4.0, &cfg).unwrap();
        let b = solve_ns(&w0, &cfg).unwrap();
        assert_eq!(
            a.solution.trajectory.last().components(),
            b.trajectory.last().components()
        );

        // A constant source matches the forced solver with exact forcing.
        let pot = random_solenoidal(&g, 5, 3, -1.0, 0.3);
        let f = ForceSpec::from_potential(&pot).unwrap();
        let src = Trajectory::constant(&f.force(), vec![0.0, 0.05, 0.1]).unwrap();
        let terms = PerturbationTerms {
            source: Some(&src),
            ..Default::default()
        };
        let a = solve_perturbation(&w0, terms, 4.0, &cfg).unwrap();
        let b = solve_nsf_with_steady(&w0, &f, &SpectralField::zeros(&g, 3), 4.0, &cfg).unwrap();
        let rel = a
            .solution
            .trajectory
            .last()
            .sub(b.trajectory.last())
            .unwrap()
            .l2_norm()
            / b.trajectory.last().l2_norm();
        assert!(rel < 1e-10, "{rel:e}");
    }

    #[test]
    fn steady_drift_equals_shifted_forced_flow() {
        // With U = U_f and f_ext = 0, w = u_f - U_f solves the perturbation system.
        let g = grid();
        let pot = random_solenoidal(&g, 8, 3, -1.0, 0.2);
        let f = ForceSpec::from_potential(&pot).unwrap();
        let steady = crate::flows::solve_steady_state(&f, 1e-14).unwrap();
        let u0 = random_solenoidal(&g, 9, 3, -1.0, 0.3);
        let cfg = SolverConfig::new(0.005, 0.2, Stepper::PicardDuhamel);
        let forced = solve_nsf_with_steady(&u0, &f, &steady, 4.0, &cfg).unwrap();
        let w0 = u0.sub(&steady).unwrap();
        let terms = PerturbationTerms {
            steady: Some(&steady),
            ..Default::default()
        };
        let pert = solve_perturbation(&w0, terms, 4.0, &cfg).unwrap();
        let expect = forced.trajectory.last().sub(&steady).unwrap();
        let rel = pert
            .solution
            .trajectory
            .last()
            .sub(&expect)
            .unwrap()
            .l2_norm()
            / expect.l2_norm();
        assert!(rel < 1e-8, "{rel:e}");
    }

    #[test]
    fn drift_must_cover_horizon() {
        let g = grid();
        let w0 = random_solenoidal(&g, 4, 3, -1.0, 0.5);
        let short = Trajectory::constant(&w0, vec![0.0, 0.05]).unwrap();
        let cfg = SolverConfig::new(0.01, 0.1, Stepper::PicardDuhamel);
        let terms = PerturbationTerms {
            drift: Some(&short),
            ..Default::default()
        };
        assert!(solve_perturbation(&w0, terms, 4.0, &cfg).is_err());
    }
}
