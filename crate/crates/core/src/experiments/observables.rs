//! Observables of a forced run that a finite lifespan would have to move.
//!
//! Nothing here decides whether a solution blows up. The report only
//! records the `L^3` series and the running distance to the steady state.

use serde::Serialize;

use crate::besov::{critical_chemin_lerner_on, lp_norm};
use crate::error::{CsnsError, Result};
use crate::flows::{solve_steady_state, LifespanFlag, MildSolution};
use crate::spectral::{ForceSpec, SpectralField};

#[derive(Clone, Debug, Serialize)]
pub struct ObservableReport {
    pub p: f64,
    pub r: f64,
    pub times: Vec<f64>,
    /// `||u(t)||_{L^3}` per snapshot.
    pub l3: Vec<f64>,
    /// `||u - U_f||` in `L^r([0, t], B^{s_p + 2/r}_{p,p})` per snapshot (0 at `t = 0`).
    pub running_distance: Vec<f64>,
    /// The same norm restricted to the second half of the run.
    pub tail_distance: f64,
    /// `max - min` of the `L^3` series.
    pub l3_variation: f64,
    /// `L^3` nondecreasing along the run and larger at the end than at the start.
    pub l3_growing: bool,
    pub guard_stop: bool,
    pub flag: LifespanFlag,
    pub last_l3: f64,
    pub last_distance: f64,
}

impl ObservableReport {
    /// Every observable finite.
    pub fn bounded(&self) -> bool {
        self.l3
            .iter()
            .chain(&self.running_distance)
            .all(|v| v.is_finite())
            && self.tail_distance.is_finite()
    }
}

/// Observables of `run` against the steady state of `f`.
pub fn blowup_observables(
    run: &MildSolution,
    f: &ForceSpec,
    p: f64,
    r: f64,
) -> Result<ObservableReport> {
    let steady = if f.is_zero() {
        SpectralField::zeros(f.potential().grid(), 3)
    } else {
        solve_steady_state(f, 1e-13)?
    };
    blowup_observables_with_steady(run, &steady, p, r)
}

pub fn blowup_observables_with_steady(
    run: &MildSolution,
    steady: &SpectralField,
    p: f64,
    r: f64,
) -> Result<ObservableReport> {
    if !(p > 3.0 && p < 5.0) {
        return Err(CsnsError::Precondition(format!(
            "observables need 3 < p < 5, got {p}"
        )));
    }
    let r_max = 2.0 * p / (p - 3.0);
    if !(r > 2.0 && r < r_max) {
        return Err(CsnsError::Precondition(format!(
            "time exponent r = {r} outside (2, {r_max})"
        )));
    }
    let tr = &run.trajectory;
    if tr.len() < 2 {
        return Err(CsnsError::Precondition(
            "observables need at least two snapshots".into(),
        ));
    }
    let l3 = tr
        .fields()
        .iter()
        .map(|u| lp_norm(u, 3.0))
        .collect::<Result<Vec<_>>>()?;
    let diff = tr.map(|u| u.sub(steady))?;
    let mut running_distance = vec![0.0];
    for i in 1..diff.len() {
        running_distance.push(critical_chemin_lerner_on(&diff, 0..=i, r, p, 2.0 / r)?);
    }
    let last = diff.len() - 1;
    let mid = tr
        .times()
        .partition_point(|&t| t < 0.5 * tr.t_end())
        .min(last - 1);
    let tail_distance = critical_chemin_lerner_on(&diff, mid..=last, r, p, 2.0 / r)?;
    let (lo, hi) = l3
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let l3_growing = l3.windows(2).all(|w| w[1] >= w[0]) && l3[last] > l3[0];
    Ok(ObservableReport {
        p,
        r,
        times: tr.times().to_vec(),
        last_l3: l3[last],
        last_distance: running_distance[last],
        l3_variation: hi - lo,
        l3_growing,
        guard_stop: run.lifespan_flag == LifespanFlag::NormBlowup,
        flag: run.lifespan_flag,
        l3,
        running_distance,
        tail_distance,
    })
}
