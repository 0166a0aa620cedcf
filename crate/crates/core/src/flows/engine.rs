//! Time stepping for `u' = Delta u + N(t, u) + F` with `F` constant.

use rustfft::num_complex::Complex64;

use super::config::{SolverConfig, Stepper};
use super::exponential::StepTables;
use super::solution::{LifespanFlag, MildSolution, StepDiagnostic};
use crate::besov::{lp_norm, Trajectory};
use crate::error::{CsnsError, Result};
use crate::spectral::{nonlinear_q, PeriodicGrid, SpectralField};

pub(crate) type Nonlinearity<'a> = dyn Fn(f64, &SpectralField) -> Result<SpectralField> + 'a;

/// `-Q(u, u/2) = -P div(u (x) u)`; shared by every solver so that term
/// deletion reproduces the plain Navier-Stokes path bit for bit.
pub(crate) fn advection(u: &SpectralField) -> Result<SpectralField> {
    Ok(nonlinear_q(u, &u.scale(0.5))?.scale(-1.0))
}

pub(crate) fn require_initial_velocity(u0: &SpectralField) -> Result<()> {
    if u0.ncomp() != 3 {
        return Err(CsnsError::Precondition(format!(
            "initial data needs 3 components, got {}",
            u0.ncomp()
        )));
    }
    if u0
        .components()
        .iter()
        .any(|c| c[0] != Complex64::new(0.0, 0.0))
    {
        return Err(CsnsError::Precondition(
            "initial data must have zero mean".into(),
        ));
    }
    let div = u0.divergence_residual();
    if div > 1e-10 {
        return Err(CsnsError::Precondition(format!(
            "initial data is not divergence-free (residual {div:e})"
        )));
    }
    Ok(())
}

/// Per mode: `decay * base + sum_i table_i * term_i`.
fn propagate(
    grid: &PeriodicGrid,
    decay: &[f64],
    base: &SpectralField,
    terms: &[(&[f64], &SpectralField)],
) -> SpectralField {
    let ks = grid.k_sq_table();
    let comps = (0..base.ncomp())
        .map(|c| {
            let b = base.coeffs(c);
            let mut out: Vec<Complex64> = b
                .iter()
                .zip(ks)
                .map(|(z, &k)| z * decay[k as usize])
                .collect();
            for (table, term) in terms {
                for ((o, z), &k) in out.iter_mut().zip(term.coeffs(c)).zip(ks) {
                    *o += z * table[k as usize];
                }
            }
            out
        })
        .collect();
    let mut field = SpectralField::from_parts(grid, comps, true);
    field.set_divergence_free(
        base.is_divergence_free() && terms.iter().all(|(_, t)| t.is_divergence_free()),
    );
    field
}

fn relative_change(new: &SpectralField, old: &SpectralField) -> Result<f64> {
    let diff = new.sub(old)?.l2_norm();
    let scale = new.l2_norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

pub(crate) struct Engine<'a> {
    cfg: &'a SolverConfig,
    grid: PeriodicGrid,
    tables: StepTables,
    dt: f64,
    forcing: Option<SpectralField>,
    nonlinear: &'a Nonlinearity<'a>,
}

struct StepOutcome {
    state: SpectralField,
    residual: f64,
    iterations: usize,
    converged: bool,
}

impl<'a> Engine<'a> {
    /// `forcing` is the solenoidal force `P f`, integrated exactly on each step.
    pub fn new(
        grid: &PeriodicGrid,
        cfg: &'a SolverConfig,
        forcing: Option<SpectralField>,
        nonlinear: &'a Nonlinearity<'a>,
    ) -> Result<Self> {
        cfg.validate()?;
        let dt = cfg.effective_dt();
        let max_k_sq = grid.k_sq_table().iter().copied().max().unwrap_or(0);
        let unit = grid.unit_wavenumber();
        let tables = StepTables::new(unit * unit, max_k_sq, dt);
        Ok(Self {
            cfg,
            grid: grid.clone(),
            tables,
            dt,
            forcing: forcing.filter(|f| !f.is_zero()),
            nonlinear,
        })
    }

    fn with_forcing<'b>(
        &'b self,
        mut terms: Vec<(&'b [f64], &'b SpectralField)>,
        full: bool,
    ) -> Vec<(&'b [f64], &'b SpectralField)> {
        if let Some(f) = &self.forcing {
            let table = if full {
                &self.tables.forcing_full
            } else {
                &self.tables.forcing_half
            };
            terms.push((table.as_slice(), f));
        }
        terms
    }

    fn step_picard(&self, t: f64, u: &SpectralField) -> Result<StepOutcome> {
        let tb = &self.tables;
        let (g, dt) = (&self.grid, self.dt);
        let n0 = (self.nonlinear)(t, u)?;
        // Start from the frozen nonlinearity.
        let mut half = propagate(
            g,
            &tb.decay_half,
            u,
            &self.with_forcing(vec![(&tb.forcing_half, &n0)], false),
        );
        let mut full = propagate(
            g,
            &tb.decay_full,
            u,
            &self.with_forcing(vec![(&tb.forcing_full, &n0)], true),
        );
        let mut residual = f64::INFINITY;
        for iteration in 1..=self.cfg.picard_max_iter {
            let n1 = (self.nonlinear)(t + 0.5 * dt, &half)?;
            let n2 = (self.nonlinear)(t + dt, &full)?;
            let w = &tb.weights;
            let next_half = propagate(
                g,
                &tb.decay_half,
                u,
                &self.with_forcing(
                    vec![(&w[0][0], &n0), (&w[0][1], &n1), (&w[0][2], &n2)],
                    false,
                ),
            );
            let next_full = propagate(
                g,
                &tb.decay_full,
                u,
                &self.with_forcing(
                    vec![(&w[1][0], &n0), (&w[1][1], &n1), (&w[1][2], &n2)],
                    true,
                ),
            );
            residual = relative_change(&next_full, &full)?.max(relative_change(&next_half, &half)?);
            half = next_half;
            full = next_full;
            if !residual.is_finite() {
                break;
            }
            if residual <= self.cfg.picard_tol {
                return Ok(StepOutcome {
                    state: full,
                    residual,
                    iterations: iteration,
                    converged: true,
                });
            }
        }
        Ok(StepOutcome {
            state: full,
            residual,
            iterations: self.cfg.picard_max_iter,
            converged: false,
        })
    }

    fn step_rk4(&self, t: f64, u: &SpectralField) -> Result<StepOutcome> {
        let tb = &self.tables;
        let (g, dt) = (&self.grid, self.dt);
        let h = 0.5 * dt;
        let half_scaled: Vec<f64> = tb.decay_half.iter().map(|e| e * h).collect();
        let full_scaled: Vec<f64> = tb.decay_half.iter().map(|e| e * dt).collect();
        let k1 = (self.nonlinear)(t, u)?;
        let a = propagate(
            g,
            &tb.decay_half,
            u,
            &self.with_forcing(vec![(&half_scaled, &k1)], false),
        );
        let k2 = (self.nonlinear)(t + h, &a)?;
        let hh = vec![h; tb.decay_half.len()];
        let b_base = propagate(g, &tb.decay_half, u, &self.with_forcing(vec![], false));
        let b = propagate(g, &ones(tb.decay_half.len()), &b_base, &[(&hh, &k2)]);
        let k3 = (self.nonlinear)(t + h, &b)?;
        let c = propagate(
            g,
            &tb.decay_full,
            u,
            &self.with_forcing(vec![(&full_scaled, &k3)], true),
        );
        let k4 = (self.nonlinear)(t + dt, &c)?;
        let w1: Vec<f64> = tb.decay_full.iter().map(|e| e * dt / 6.0).collect();
        let w23: Vec<f64> = tb.decay_half.iter().map(|e| e * dt / 3.0).collect();
        let w4 = vec![dt / 6.0; tb.decay_full.len()];
        let state = propagate(
            g,
            &tb.decay_full,
            u,
            &self.with_forcing(vec![(&w1, &k1), (&w23, &k2), (&w23, &k3), (&w4, &k4)], true),
        );
        Ok(StepOutcome {
            state,
            residual: 0.0,
            iterations: 0,
            converged: true,
        })
    }

    /// Advance from `u0` at `t = 0` to `cfg.t_end`.
    pub fn run(&self, u0: &SpectralField) -> Result<MildSolution> {
        let cfg = self.cfg;
        let steps = cfg.step_count();
        let h = self.grid.spacing();
        let mut times = vec![0.0];
        let mut fields = vec![u0.clone()];
        let mut diagnostics = Vec::with_capacity(steps + 1);
        let linf0 = u0.to_physical().max_magnitude();
        diagnostics.push(StepDiagnostic {
            t: 0.0,
            l3: lp_norm(u0, 3.0)?,
            linf: linf0,
            residual: 0.0,
            picard_iterations: 0,
            cfl: linf0 * self.dt / h,
        });
        let mut flag = LifespanFlag::Completed;
        let mut u = u0.clone();
        let mut t = 0.0;
        for step in 1..=steps {
            let outcome = match cfg.stepper {
                Stepper::PicardDuhamel => self.step_picard(t, &u)?,
                Stepper::IntegratingFactorRk4 => self.step_rk4(t, &u)?,
            };
            let t_next = if step == steps {
                cfg.t_end
            } else {
                step as f64 * self.dt
            };
            let linf = outcome.state.to_physical().max_magnitude();
            if !outcome.converged {
                flag = if linf.is_finite() && linf <= cfg.linf_guard {
                    LifespanFlag::IterationFailure
                } else {
                    LifespanFlag::NormBlowup
                };
                break;
            }
            if !(linf.is_finite() && linf <= cfg.linf_guard) {
                flag = LifespanFlag::NormBlowup;
                if linf.is_finite() {
                    // Keep the state that tripped the guard.
                    times.push(t_next);
                    fields.push(outcome.state.clone());
                    diagnostics.push(StepDiagnostic {
                        t: t_next,
                        l3: lp_norm(&outcome.state, 3.0)?,
                        linf,
                        residual: outcome.residual,
                        picard_iterations: outcome.iterations,
                        cfl: linf * self.dt / h,
                    });
                }
                break;
            }
            u = outcome.state;
            t = t_next;
            diagnostics.push(StepDiagnostic {
                t,
                l3: lp_norm(&u, 3.0)?,
                linf,
                residual: outcome.residual,
                picard_iterations: outcome.iterations,
                cfl: linf * self.dt / h,
            });
            if step % cfg.snapshot_stride == 0 || step == steps {
                times.push(t);
                fields.push(u.clone());
            }
        }
        if *times.last().expect("nonempty") < t {
            times.push(t);
            fields.push(u);
        }
        let final_time = *times.last().expect("nonempty");
        let trajectory = Trajectory::new(times, fields)?;
        Ok(MildSolution {
            trajectory,
            lifespan_flag: flag,
            final_time,
            diagnostics,
            forced: None,
        })
    }
}

fn ones(len: usize) -> Vec<f64> {
    vec![1.0; len]
}
