use std::f64::consts::PI;

use csns_core::besov::{lp_norm, Trajectory};
use csns_core::estimates::{
    log_bound_slope, measure_k, verify_perturbation_bound, PerturbationBound, PerturbationProbe,
};
use csns_core::flows::{
    solve_ns, solve_nsf_with_steady, solve_steady_state, solve_steady_state_with_report,
    steady_state_threshold, SolverConfig, Stepper,
};
use csns_core::spectral::random::random_solenoidal;
use csns_core::spectral::{heat_semigroup, ForceSpec, PeriodicGrid, SpectralField};

use crate::support::{ensure, grid, max_of, Context, Verdict};

fn unit_shape(g: &PeriodicGrid, seed: u64) -> Result<ForceSpec, String> {
    let pot = random_solenoidal(g, seed, 3, -1.0, 1.0);
    let pot = pot.scale(1.0 / lp_norm(&pot, 3.0).ctx("norm")?);
    ForceSpec::from_potential(&pot).ctx("force")
}

/// Increments above this are resolved; below it the ratio is roundoff.
const RESOLVED_INCREMENT: f64 = 1e-13;

pub fn steady_state() -> Verdict {
    let g = grid(32, 2.0 * PI);
    let mut summary = Vec::new();
    let mut violations = Vec::new();
    for seed in [3u64, 8] {
        let shape = unit_shape(&g, seed)?;
        let th = steady_state_threshold(&shape, 0.01, 100.0, 18, 1e-12).ctx("threshold")?;
        let delta = th.delta_num;
        let (mut converged, mut worst_ratio) = (0, 0.0f64);
        let fractions = [
            0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0,
        ];
        for frac in fractions {
            let size = frac * delta;
            let f = shape.scaled(size / shape.l3_size());
            let Ok((_, rep)) = solve_steady_state_with_report(&f, 1e-12) else {
                continue;
            };
            converged += 1;
            if rep.l3 > 2.0 * f.l3_size() {
                violations.push(format!(
                    "seed {seed}, {frac} delta: |U| = {:e} > 2 |g| = {:e}",
                    rep.l3,
                    2.0 * f.l3_size()
                ));
            }
            if frac <= 0.5 {
                let r = max_of(
                    rep.increments
                        .windows(2)
                        .filter(|w| w[1] > RESOLVED_INCREMENT)
                        .map(|w| w[1] / w[0]),
                );
                worst_ratio = worst_ratio.max(r);
                if r > 0.5 {
                    violations.push(format!("seed {seed}, {frac} delta: increment ratio {r:.3}"));
                }
            }
        }
        if converged < fractions.len() / 2 {
            violations.push(format!("seed {seed}: only {converged} sizes converged"));
        }
        summary.push(format!(
            "seed {seed}: delta_num {delta:.3}, {converged}/{} converged, certificate held, ratio below delta_num/2 <= {worst_ratio:.3}",
            fractions.len()
        ));
    }
    let summary = summary.join("; ");
    if violations.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", violations.join("; ")))
    }
}

fn rel_l2(a: &SpectralField, b: &SpectralField) -> Result<f64, String> {
    Ok(a.sub(b).ctx("diff")?.l2_norm() / b.l2_norm())
}

pub fn solver_cross_validation() -> Verdict {
    let g = grid(32, 2.0 * PI);
    let mut worst: f64 = 0.0;
    for seed in [1u64, 2, 3] {
        let u0 = random_solenoidal(&g, seed, 3, -1.0, 0.5);
        let run = |s| solve_ns(&u0, &SolverConfig::new(1e-3, 0.1, s).with_stride(100));
        let a = run(Stepper::PicardDuhamel).ctx("picard")?;
        let b = run(Stepper::IntegratingFactorRk4).ctx("rk4")?;
        ensure(a.completed() && b.completed(), || {
            "run stopped early".into()
        })?;
        let e = rel_l2(a.trajectory.last(), b.trajectory.last())?;
        ensure(e <= 1e-6, || {
            format!("seed {seed}: steppers differ by {e:e}")
        })?;
        worst = worst.max(e);
    }
    let f = unit_shape(&g, 5)?.scaled(0.05);
    let steady = solve_steady_state(&f, 1e-13).ctx("steady")?;
    let cfg = SolverConfig::new(0.01, 1.0, Stepper::PicardDuhamel);
    let run = solve_nsf_with_steady(&steady, &f, &steady, 4.0, &cfg).ctx("stationary")?;
    let mut drift: f64 = 0.0;
    for u in run.trajectory.fields() {
        drift = drift.max(rel_l2(u, &steady)?);
    }
    ensure(drift <= 1e-8, || {
        format!("stationary start drifted by {drift:e}")
    })?;
    Ok(format!(
        "stepper gap {worst:.2e} at t = 0.1, stationary drift {drift:.2e} over [0, 1]"
    ))
}

const P: f64 = 4.0;

fn heat_drift(g: &PeriodicGrid, seed: u64, rms: f64, times: &[f64]) -> Result<Trajectory, String> {
    let u = random_solenoidal(g, seed, 2, -1.0, rms);
    let fields = times
        .iter()
        .map(|&t| heat_semigroup(&u, t))
        .collect::<csns_core::Result<Vec<_>>>()
        .ctx("heat")?;
    Trajectory::new(times.to_vec(), fields).ctx("trajectory")
}

/// Run mesh: 200 steps on `[0, 0.2]`, fine enough that a single step of
/// every drift in the sweep stays below the splitting threshold.
const DT: f64 = 1e-3;

fn probe_cfg() -> SolverConfig {
    SolverConfig::new(DT, 0.2, Stepper::PicardDuhamel)
}

fn probe_times() -> Vec<f64> {
    (0..=200).map(|i| DT * i as f64).collect()
}

fn corpus_probe(g: &PeriodicGrid, i: u64) -> Result<PerturbationProbe, String> {
    let times = probe_times();
    let drift_rms = [0.0, 0.02, 0.05, 0.1, 0.2][i as usize % 5];
    let drift = (drift_rms > 0.0)
        .then(|| heat_drift(g, 100 + i, drift_rms, &times))
        .transpose()?;
    let source = (i % 4 == 3)
        .then(|| heat_drift(g, 200 + i, 1e-6, &times))
        .transpose()?;
    let w0 = random_solenoidal(g, 300 + i, 3, -1.0, 1e-7 * (1.0 + (i % 3) as f64));
    PerturbationProbe::run(&w0, drift.as_ref(), None, source.as_ref(), P, &probe_cfg())
        .ctx("perturbation run")
}

pub fn perturbation_bound() -> Verdict {
    let g = grid(16, 2.0 * PI);
    let probes = (0..20)
        .map(|i| corpus_probe(&g, i))
        .collect::<Result<Vec<_>, _>>()?;
    let k = measure_k(&probes, P, 0.0, 4).ctx("K")?.k;
    let mut min_slack_ratio = f64::INFINITY;
    for (i, pr) in probes.iter().enumerate() {
        let b = verify_perturbation_bound(pr, P, k).ctx("bound")?;
        ensure(b.gate_met, || {
            format!(
                "run {i}: data {:e} above gate {:e}",
                b.data_norm, b.gate_threshold
            )
        })?;
        ensure(b.slack > 0.0, || {
            format!(
                "run {i}: measured {:e} exceeds bound {:e}",
                b.measured, b.bound
            )
        })?;
        min_slack_ratio = min_slack_ratio.min(b.slack / b.bound);
    }

    let times = probe_times();
    let w0 = random_solenoidal(&g, 400, 3, -1.0, 1e-7);
    let mut sweep: Vec<PerturbationBound> = Vec::new();
    for step in 0..8 {
        let drift = heat_drift(&g, 500, 0.0125 * 2f64.powi(step), &times)?;
        let pr = PerturbationProbe::run(&w0, Some(&drift), None, None, P, &probe_cfg())
            .ctx("sweep run")?;
        match verify_perturbation_bound(&pr, P, k) {
            Ok(b) => sweep.push(b),
            // The drift no longer splits on this mesh; the sweep ends here.
            Err(_) => break,
        }
    }
    let slope = log_bound_slope(&sweep);
    let points: Vec<String> = sweep
        .iter()
        .map(|b| {
            format!(
                "(|g| {:.3}, N {}, ln B {:.2})",
                b.g_norm,
                b.pieces,
                b.bound.ln()
            )
        })
        .collect();
    println!("  criterion 8 doubling sweep: {}", points.join(" "));
    let chord: Vec<f64> = sweep
        .windows(2)
        .map(|w| (w[1].bound.ln() - w[0].bound.ln()) / (w[1].g_norm - w[0].g_norm))
        .collect();
    ensure(sweep.len() >= 3, || {
        format!("only {} sweep points", sweep.len())
    })?;
    // At most linear: the chord slopes of ln(bound) against |g| do not increase.
    let linear = chord
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12);
    let detail = format!(
        "K {k:.3}, 20 runs gated with slack >= {:.1}% of bound; sweep slope {:?}, chord slopes {:?}",
        100.0 * min_slack_ratio,
        slope,
        chord.iter().map(|c| (c * 1e3).round() / 1e3).collect::<Vec<_>>()
    );
    ensure(linear, || {
        format!("log-bound grows faster than linearly: {detail}")
    })?;
    Ok(detail)
}
