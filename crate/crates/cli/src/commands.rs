//! One function per subcommand. Each validates its part of the configuration,
//! computes, writes artifacts and returns a summary for standard output.

use csns_core::besov::{critical_chemin_lerner, Trajectory};
use csns_core::estimates::{
    measure_k, verify_duhamel_smoothing, verify_heat_block_decay, verify_perturbation_bound,
    verify_product_law_1, verify_product_law_2, verify_product_law_3, verify_product_law_4,
    EstimateReport, PerturbationProbe,
};
use csns_core::experiments::{
    blowup_observables_with_steady, decomposition_of_solutions, lambda_scan, ObservableReport,
};
use csns_core::flows::persist::write_solution;
use csns_core::flows::{
    drift_smallness_check, solve_ns, solve_nsf_with_steady, solve_steady_state,
    solve_steady_state_with_report,
};
use csns_core::profiles::{extract_profiles, synthesize, write_profile_set};
use csns_core::spectral::snapshot::write_snapshot;
use csns_core::spectral::{ForceSpec, PeriodicGrid, SpectralField};
use serde_json::{json, Value};

use crate::config::{field_violations, RunConfig, Suite};
use crate::error::{at, CliError, CliResult};
use crate::fields::{build_family, build_field, build_force};
use crate::manifest::Artifacts;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Steady,
    Perturb,
    Verify,
    Profiles,
    LambdaScan,
    DecomposeSolutions,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Steady => "steady",
            Command::Perturb => "perturb",
            Command::Verify => "verify",
            Command::Profiles => "profiles",
            Command::LambdaScan => "lambda-scan",
            Command::DecomposeSolutions => "decompose-solutions",
        }
    }
}

/// Every gate the command's inputs must pass before compute starts.
pub fn violations(cmd: Command, cfg: &RunConfig) -> Vec<String> {
    let mut bad = cfg.common_violations();
    let force = field_violations("force", &cfg.force, false);
    match cmd {
        Command::Simulate => {
            bad.extend(cfg.solver_violations());
            bad.extend(field_violations("initial", &cfg.initial, true));
            bad.extend(force);
            let (p, r) = (cfg.p, cfg.observables.r);
            if p > 3.0 && !(r > 2.0 && r < 2.0 * p / (p - 3.0)) {
                bad.push(format!("observables.r = {r} outside (2, 2p/(p-3))"));
            }
        }
        Command::Steady => {
            bad.extend(force);
            if !(cfg.steady.tol > 0.0) {
                bad.push(format!("steady.tol = {} must be positive", cfg.steady.tol));
            }
        }
        Command::Perturb => {
            bad.extend(cfg.solver_violations());
            bad.extend(field_violations("initial", &cfg.initial, false));
            bad.extend(field_violations("perturb.drift", &cfg.perturb.drift, false));
            bad.extend(force);
            if cfg.perturb.k_pieces == 0 {
                bad.push("perturb.k_pieces must be positive".into());
            }
        }
        Command::Verify => {
            let v = &cfg.verify;
            if let Err(e) = v.corpus_spec(cfg.seed).validate() {
                bad.push(format!("verify.corpus: {e}"));
            }
            if v.resolutions.is_empty() {
                bad.push("verify.resolutions is empty".into());
            }
            for &n in &v.resolutions {
                if !csns_core::spectral::admissible_points(n) {
                    bad.push(format!("verify.resolutions: {n} is not an admissible size"));
                }
            }
            if v.suites.is_empty() {
                bad.push("verify.suites is empty".into());
            }
            if !(v.stability_limit > 1.0) {
                bad.push("verify.stability_limit must exceed 1".into());
            }
        }
        Command::Profiles => {
            bad.extend(family_violations("profiles.family", &cfg.profiles.family));
            if !(cfg.profiles.extraction.p > 3.0) {
                bad.push("profiles.extraction.p must exceed 3".into());
            }
        }
        Command::LambdaScan => {
            bad.extend(field_violations("initial", &cfg.initial, false));
            bad.extend(force);
            if let Err(e) = cfg.lambda_scan.validate() {
                bad.push(format!("lambda_scan: {e}"));
            }
        }
        Command::DecomposeSolutions => {
            bad.extend(cfg.solver_violations());
            bad.extend(force);
            bad.extend(family_violations("decompose.family", &cfg.decompose.family));
            if cfg.decompose.j0 >= cfg.decompose.family.profiles.len().max(1) {
                bad.push(format!(
                    "decompose.j0 = {} is not a profile index",
                    cfg.decompose.j0
                ));
            }
        }
    }
    bad
}

fn family_violations(what: &str, family: &crate::config::PlantedFamily) -> Vec<String> {
    let mut bad = Vec::new();
    if family.count == 0 {
        bad.push(format!("{what}.count must be positive"));
    }
    for (j, p) in family.profiles.iter().enumerate() {
        bad.extend(field_violations(
            &format!("{what}.profiles[{j}]"),
            &p.field,
            false,
        ));
    }
    bad.extend(field_violations(
        &format!("{what}.remainder"),
        &family.remainder,
        false,
    ));
    bad
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub out: Artifacts,
}

impl Context<'_> {
    fn grid(&self) -> CliResult<PeriodicGrid> {
        self.cfg.grid()
    }

    fn progress(&mut self, stage: &str) {
        eprintln!("progress: {stage}");
        self.out.stage(stage, "started", None);
    }

    fn done(&mut self, stage: &str) {
        self.out.stage(stage, "ok", None);
    }

    fn config_json(&self) -> Value {
        serde_json::to_value(self.cfg).expect("config serializes")
    }
}

fn force_and_steady(
    ctx: &mut Context,
    grid: &PeriodicGrid,
) -> CliResult<(ForceSpec, SpectralField)> {
    let f = build_force(&ctx.cfg.force, grid, ctx.cfg.seed).map_err(at("force"))?;
    let steady = if f.is_zero() {
        SpectralField::zeros(grid, 3)
    } else {
        ctx.progress("steady");
        let u = solve_steady_state(&f, ctx.cfg.steady.tol).map_err(at("steady"))?;
        ctx.done("steady");
        u
    };
    Ok((f, steady))
}

fn observables_csv(rep: &ObservableReport) -> String {
    let mut s = String::from("t,l3,running_distance\n");
    for i in 0..rep.times.len() {
        s.push_str(&format!(
            "{:?},{:?},{:?}\n",
            rep.times[i], rep.l3[i], rep.running_distance[i]
        ));
    }
    s
}

pub fn simulate(ctx: &mut Context) -> CliResult<Value> {
    let grid = ctx.grid()?;
    let (f, steady) = force_and_steady(ctx, &grid)?;
    let u0 =
        build_field(&ctx.cfg.initial, &grid, ctx.cfg.seed, Some(&steady)).map_err(at("initial"))?;
    ctx.progress("solve");
    let sol =
        solve_nsf_with_steady(&u0, &f, &steady, ctx.cfg.p, &ctx.cfg.solver).map_err(at("solve"))?;
    write_solution(&ctx.out.path("trajectory"), &sol, ctx.config_json()).map_err(at("output"))?;
    let observables = if sol.trajectory.len() >= 2 {
        let rep = blowup_observables_with_steady(&sol, &steady, ctx.cfg.p, ctx.cfg.observables.r)
            .map_err(at("observables"))?;
        ctx.out.write("observables.csv", observables_csv(&rep))?;
        Some(rep)
    } else {
        None
    };
    let summary = json!({
        "command": "simulate",
        "completed": sol.completed(),
        "lifespan_flag": sol.lifespan_flag,
        "final_time": sol.final_time,
        "snapshots": sol.trajectory.len(),
        "forced": sol.forced,
        "observables": observables.as_ref().map(|r| json!({
            "last_l3": r.last_l3,
            "l3_variation": r.l3_variation,
            "last_distance": r.last_distance,
            "tail_distance": r.tail_distance,
            "l3_growing": r.l3_growing,
            "guard_stop": r.guard_stop,
        })),
    });
    ctx.out.write_json("summary.json", &summary)?;
    if !sol.completed() {
        ctx.out
            .stage("solve", "failed", Some(format!("{:?}", sol.lifespan_flag)));
        return Err(CliError::Compute {
            stage: "solve".into(),
            kind: "solver".into(),
            message: format!(
                "run stopped at t = {} with flag {:?}; partial trajectory kept",
                sol.final_time, sol.lifespan_flag
            ),
        });
    }
    ctx.done("solve");
    Ok(summary)
}

pub fn steady(ctx: &mut Context) -> CliResult<Value> {
    let grid = ctx.grid()?;
    let f = build_force(&ctx.cfg.force, &grid, ctx.cfg.seed).map_err(at("force"))?;
    ctx.progress("steady");
    let (u, report) =
        solve_steady_state_with_report(&f, ctx.cfg.steady.tol).map_err(at("steady"))?;
    ctx.done("steady");
    write_snapshot(&ctx.out.path("steady.bin"), &u).map_err(at("output"))?;
    let summary = json!({
        "command": "steady",
        "force_size": f.l3_size(),
        "report": report,
    });
    ctx.out.write_json("summary.json", &summary)?;
    if report.l3 > report.certificate_bound {
        return Err(CliError::Gate {
            failed: vec![format!(
                "steady state L3 norm {} exceeds the certificate {}",
                report.l3, report.certificate_bound
            )],
        });
    }
    Ok(summary)
}

pub fn perturb(ctx: &mut Context) -> CliResult<Value> {
    let grid = ctx.grid()?;
    let cfg = ctx.cfg;
    let (_, steady) = force_and_steady(ctx, &grid)?;
    let w0 = build_field(&cfg.initial, &grid, cfg.seed, None).map_err(at("initial"))?;
    let drift_data = build_field(&cfg.perturb.drift, &grid, cfg.seed.wrapping_add(1), None)
        .map_err(at("drift"))?;
    let drift: Option<Trajectory> = if drift_data.is_zero() {
        None
    } else {
        ctx.progress("drift");
        let run = solve_ns(&drift_data, &cfg.solver).map_err(at("drift"))?;
        if !run.completed() {
            return Err(CliError::Compute {
                stage: "drift".into(),
                kind: "solver".into(),
                message: format!("drift run stopped with flag {:?}", run.lifespan_flag),
            });
        }
        ctx.done("drift");
        Some(run.trajectory)
    };
    let steady_ref = (!steady.is_zero()).then_some(&steady);
    ctx.progress("perturbation");
    let probe = PerturbationProbe::run(&w0, drift.as_ref(), steady_ref, None, cfg.p, &cfg.solver)
        .map_err(at("perturbation"))?;
    csns_core::flows::persist::write_trajectory(
        &ctx.out.path("perturbation"),
        &probe.w,
        ctx.config_json(),
    )
    .map_err(at("output"))?;
    if !probe.completed {
        return Err(CliError::Compute {
            stage: "perturbation".into(),
            kind: "solver".into(),
            message: "perturbation run stopped early; partial trajectory kept".into(),
        });
    }
    ctx.done("perturbation");
    let c1 = match steady_ref {
        Some(u) if !probe.w.is_zero() => {
            drift_smallness_check(u, std::slice::from_ref(&probe.w), cfg.p).map_err(at("k"))?
        }
        _ => 0.0,
    };
    let km = measure_k(
        std::slice::from_ref(&probe),
        cfg.p,
        c1,
        cfg.perturb.k_pieces,
    )
    .map_err(at("k"))?;
    let k = if km.k > 0.0 { km.k } else { 1.0 };
    let bound = verify_perturbation_bound(&probe, cfg.p, k).map_err(at("bound"))?;
    let w_norm =
        critical_chemin_lerner(&probe.w, cfg.p, cfg.p, 2.0 / cfg.p).map_err(at("bound"))?;
    let summary = json!({
        "command": "perturb",
        "k": km,
        "bound": bound,
        "w_norm": w_norm,
    });
    ctx.out.write_json("summary.json", &summary)?;
    if bound.gate_met && bound.measured > bound.bound {
        return Err(CliError::Gate {
            failed: vec![format!(
                "perturbation norm {} exceeds the bound {} although the smallness gate holds",
                bound.measured, bound.bound
            )],
        });
    }
    Ok(summary)
}

/// Whether `report` passes its invariant gate.
pub fn suite_gate(suite: &Suite, report: &EstimateReport, limit: f64) -> Option<String> {
    let stable = report.is_stable(limit);
    let heat_p2 = matches!(suite, Suite::HeatDecay { p, .. } if *p == 2.0);
    if heat_p2 && report.measured_constant > 1.0 + 1e-12 {
        return Some(format!(
            "heat_decay at p = 2: ratio {} exceeds 1 + 1e-12",
            report.measured_constant
        ));
    }
    (!stable).then(|| {
        format!(
            "{}: constant {} with stability ratio {} (limit {limit})",
            report.inequality_id, report.measured_constant, report.stability_ratio
        )
    })
}

pub fn verify(ctx: &mut Context) -> CliResult<Value> {
    let cfg = ctx.cfg;
    let v = &cfg.verify;
    let corpus = v.corpus_spec(cfg.seed);
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for suite in &v.suites {
        ctx.progress(suite.id());
        let res = &v.resolutions;
        let report = match suite {
            Suite::HeatDecay { p, times } => verify_heat_block_decay(&corpus, res, *p, times),
            Suite::DuhamelSmoothing(law) => verify_duhamel_smoothing(&corpus, res, *law),
            Suite::ProductLaw1(law) => verify_product_law_1(&corpus, res, *law),
            Suite::ProductLaw2(law) => verify_product_law_2(&corpus, res, *law),
            Suite::ProductLaw3(law) => verify_product_law_3(&corpus, res, *law),
            Suite::ProductLaw4(law) => verify_product_law_4(&corpus, res, *law),
        }
        .map_err(|e| CliError::compute(suite.id(), e))?;
        match suite_gate(suite, &report, v.stability_limit) {
            Some(msg) => {
                ctx.out.stage(suite.id(), "gate_failed", Some(msg.clone()));
                failed.push(msg);
            }
            None => ctx.done(suite.id()),
        }
        reports.push(report);
    }
    ctx.out.write_json("verify/reports.json", &reports)?;
    ctx.out.write(
        "verify/aggregate.csv",
        csns_core::estimates::aggregate_csv(&reports),
    )?;
    let summary = json!({
        "command": "verify",
        "corpus_size": corpus.len(),
        "resolutions": v.resolutions,
        "suites": reports.iter().map(|r| json!({
            "id": r.inequality_id,
            "constant": r.measured_constant,
            "stability_ratio": r.stability_ratio,
        })).collect::<Vec<_>>(),
        "failed": failed,
    });
    ctx.out.write_json("summary.json", &summary)?;
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::Gate { failed })
    }
}

pub fn profiles(ctx: &mut Context) -> CliResult<Value> {
    let grid = ctx.grid()?;
    let cfg = ctx.cfg;
    let truth = build_family(&cfg.profiles.family, &grid, cfg.seed).map_err(at("family"))?;
    let seq = (0..truth.len())
        .map(|n| synthesize(&truth, n))
        .collect::<csns_core::Result<Vec<_>>>()
        .map_err(at("synthesize"))?;
    ctx.progress("extract");
    let (set, report) =
        extract_profiles(&seq, &cfg.profiles.extraction, Some(&truth)).map_err(at("extract"))?;
    ctx.done("extract");
    write_profile_set(&ctx.out.path("planted"), &truth, None).map_err(at("output"))?;
    write_profile_set(&ctx.out.path("extracted"), &set, None).map_err(at("output"))?;
    ctx.out.write("defects.csv", report.defects_csv())?;
    ctx.out.write_json("report.json", &report)?;
    let mut failed = Vec::new();
    if set.profile_count() != truth.profile_count() {
        failed.push(format!(
            "recovered {} profiles, planted {}",
            set.profile_count(),
            truth.profile_count()
        ));
    }
    if let Some(cmp) = &report.planted {
        if cmp.scale_errors.iter().any(|&e| e != 0) {
            failed.push(format!("scale errors {:?}", cmp.scale_errors));
        }
        if cmp.core_errors_cells.iter().any(|&e| e > 1.0) {
            failed.push(format!("core errors {:?} cells", cmp.core_errors_cells));
        }
        let last = report.remainder_norms.last().copied().unwrap_or(0.0);
        if last > cmp.planted_remainder_norm + 1e-8 {
            failed.push(format!(
                "remainder {last} above planted {} + 1e-8",
                cmp.planted_remainder_norm
            ));
        }
    }
    let summary = json!({
        "command": "profiles",
        "planted_profiles": truth.profile_count(),
        "recovered_profiles": set.profile_count(),
        "stop_reason": report.stop_reason,
        "remainder_norms": report.remainder_norms,
        "planted": report.planted,
        "failed": failed,
    });
    ctx.out.write_json("summary.json", &summary)?;
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::Gate { failed })
    }
}

pub fn lambda_scan_cmd(ctx: &mut Context) -> CliResult<Value> {
    let grid = ctx.grid()?;
    let cfg = ctx.cfg;
    let f = build_force(&cfg.force, &grid, cfg.seed).map_err(at("force"))?;
    let u0 = build_field(&cfg.initial, &grid, cfg.seed, None).map_err(at("initial"))?;
    ctx.progress("scan");
    let result = lambda_scan(&u0, &f, &cfg.lambda_scan).map_err(at("scan"))?;
    ctx.done("scan");
    ctx.out.write("lambda_scan.csv", result.to_csv())?;
    if let Some(run) = &result.global_run {
        ctx.out
            .write("global_observables.csv", observables_csv(&run.observables))?;
    }
    ctx.out.write_json("result.json", &result)?;
    let finite = result
        .rungs
        .iter()
        .all(|r| r.drift_norm.is_finite() && r.source_norm.is_finite() && r.r_norm.is_finite());
    let summary = json!({
        "command": "lambda-scan",
        "lambdas": result.lambdas(),
        "source_norms": result.source_norms(),
        "decay_exponent": result.decay_exponent,
        "truncated": result.truncated,
        "truncation_reason": result.truncation_reason,
        "first_gated": result.first_gated,
        "global_completed": result.global_run.as_ref().map(|g| g.completed),
        "global_bounded": result.global_run.as_ref().map(|g| g.observables.bounded()),
    });
    ctx.out.write_json("summary.json", &summary)?;
    if !finite {
        return Err(CliError::Gate {
            failed: vec!["non-finite norm along the ladder".into()],
        });
    }
    Ok(summary)
}

pub fn decompose(ctx: &mut Context) -> CliResult<Value> {
    let grid = ctx.grid()?;
    let cfg = ctx.cfg;
    let f = build_force(&cfg.force, &grid, cfg.seed).map_err(at("force"))?;
    let set = build_family(&cfg.decompose.family, &grid, cfg.seed).map_err(at("family"))?;
    ctx.progress("decompose");
    let report = decomposition_of_solutions(&set, &f, cfg.decompose.j0, cfg.p, &cfg.solver)
        .map_err(at("decompose"))?;
    ctx.out.write("decomposition.csv", report.to_csv())?;
    ctx.out.write_json("report.json", &report)?;
    if let Some(fail) = &report.failure {
        ctx.out
            .stage("decompose", "failed", Some(fail.message.clone()));
        return Err(CliError::Compute {
            stage: format!("decompose/{}", fail.stage),
            kind: "solver".into(),
            message: fail.message.clone(),
        });
    }
    ctx.done("decompose");
    let violated: Vec<String> = report
        .entries
        .iter()
        .filter(|e| e.bound_holds() == Some(false))
        .map(|e| format!("n = {}, J = {}: remainder above its bound", e.n, e.j))
        .collect();
    let summary = json!({
        "command": "decompose-solutions",
        "tau": report.tau,
        "permutations": report.permutations,
        "k": report.k,
        "entries": report.entries.len(),
        "bound_violations": violated,
    });
    ctx.out.write_json("summary.json", &summary)?;
    if violated.is_empty() {
        Ok(summary)
    } else {
        Err(CliError::Gate { failed: violated })
    }
}
