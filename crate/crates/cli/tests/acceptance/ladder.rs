use std::f64::consts::PI;

use csns_core::experiments::{lambda_scan as scan, LambdaScanConfig};
use csns_core::flows::{SolverConfig, Stepper};
use csns_core::profiles::families::unit_shell_field;
use csns_core::spectral::random::random_solenoidal;
use csns_core::spectral::ForceSpec;

use crate::support::{ensure, grid, Context, Verdict};

pub fn lambda_scan() -> Verdict {
    let g = grid(32, 2.0 * PI);
    // |k_i| <= 1 keeps three contractions on the grid.
    let u0 = random_solenoidal(&g, 12, 1, -1.0, 0.2);
    let cfg = LambdaScanConfig {
        m_max: 3,
        solver: SolverConfig::new(0.01, 0.25, Stepper::PicardDuhamel),
        ..LambdaScanConfig::default()
    };

    let unforced = scan(&u0, &ForceSpec::zero(&g), &cfg).ctx("f = 0 scan")?;
    ensure(
        unforced
            .rungs
            .iter()
            .all(|r| r.source_norm == 0.0 && r.r_norm == 0.0),
        || "f = 0 left a nonzero source or perturbation".into(),
    )?;

    let pot = unit_shell_field(&g, [1.0, -1.0, 0.5, 0.0, 0.3, -0.2], 0.0)
        .ctx("force shape")?
        .scale(0.6);
    let f = ForceSpec::from_potential(&pot).ctx("force")?;
    let res = scan(&u0, &f, &cfg).ctx("forced scan")?;
    for r in &res.rungs {
        println!(
            "  criterion 12 rung m={}: |u| {:.3e}, |Q| {:.3e}, |r| {:.3e}, N {:?}, gate {:?} met {}",
            r.exponent, r.drift_norm, r.source_norm, r.r_norm, r.pieces, r.gate_threshold, r.gate_met
        );
    }
    ensure(!res.truncated && res.rungs.len() == 4, || {
        format!("ladder truncated: {:?}", res.truncation_reason)
    })?;
    let source = res.source_norms();
    ensure(source.windows(2).all(|w| w[1] < w[0]), || {
        format!("source norms not decreasing: {source:?}")
    })?;
    let rate = res.decay_exponent.unwrap_or(f64::NAN);
    ensure(rate > 0.0, || format!("fitted exponent {rate}"))?;
    let m = res.first_gated.ok_or("no rung passed the gate")?;
    let global = res.global_run.as_ref().ok_or("no global run")?;
    ensure(global.completed, || {
        format!("global run from m = {m} stopped early")
    })?;
    let obs = &global.observables;
    ensure(obs.bounded() && !obs.guard_stop, || {
        format!("observables unbounded at m = {m}")
    })?;
    Ok(format!(
        "f = 0 gives zeros; source decay exponent {rate:.3} over m = 0..3, first gated rung m = {m}, {} turnover-time run completed with L3 in [{:.3e}, {:.3e}]",
        global.horizon,
        obs.l3.iter().copied().fold(f64::INFINITY, f64::min),
        obs.l3.iter().copied().fold(0.0, f64::max)
    ))
}
