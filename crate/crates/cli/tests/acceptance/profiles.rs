use std::f64::consts::PI;

use csns_core::besov::{lp_norm, Trajectory};
use csns_core::experiments::{
    decomposition_of_solutions as decompose, decreasing_up_to_one, truncate_for_dilation,
};
use csns_core::flows::{SolverConfig, Stepper};
use csns_core::profiles::families::{gaussian_bump, gaussian_vortex, unit_shell_field};
use csns_core::profiles::{
    extract_profiles, geometric_decay_exponent, orthogonality_value, product_orthogonality_decay,
    pythagorean_defect, synthesize, ExtractionConfig, ProductPair, ProductParams, ProfileSet,
    ScaleCore,
};
use csns_core::spectral::random::random_band_limited;
use csns_core::spectral::{
    gradient, heat_semigroup, leray_project, Complex64, ForceSpec, PeriodicGrid, SpectralField,
};

use crate::support::{ensure, grid, Context, Verdict};

fn heat_flow(u: &SpectralField, horizon: f64, samples: usize) -> Result<Trajectory, String> {
    let times: Vec<f64> = (0..samples)
        .map(|i| horizon * i as f64 / (samples - 1) as f64)
        .collect();
    let fields = times
        .iter()
        .map(|&t| heat_semigroup(u, t))
        .collect::<csns_core::Result<Vec<_>>>()
        .ctx("heat")?;
    Trajectory::new(times, fields).ctx("trajectory")
}

fn scalar_mode(g: &PeriodicGrid, k: [i64; 3]) -> Result<SpectralField, String> {
    SpectralField::single_mode(g, k, &[Complex64::new(0.5, 0.0)]).ctx("mode")
}

fn rounded(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| format!("{x:.3e}")).collect()
}

pub fn orthogonality_decay() -> Verdict {
    let count = 6;
    let fixed = vec![ScaleCore::IDENTITY; count];
    let both = |pair: ProductPair<'_>, second: &[ScaleCore], e: f64| -> Result<Vec<f64>, String> {
        let params = ProductParams {
            p: 4.0,
            time_exponent: e,
            horizon: 1.0,
        };
        product_orthogonality_decay(pair, &fixed, second, &params).ctx("product decay")
    };

    // Scale separation: a |k| = 1 mode contracted five times still fits at N = 96.
    let g = grid(96, 2.0 * PI);
    let v = heat_flow(&scalar_mode(&g, [1, 0, 0])?, 1.0, 17)?;
    let w = heat_flow(&scalar_mode(&g, [0, 1, 0])?, 1.0, 17)?;
    let steady = scalar_mode(&g, [0, 0, 1])?;
    let scales: Vec<ScaleCore> = (0..count as i32)
        .map(|n| ScaleCore::new(n, [0.0; 3]))
        .collect();
    let traj = both(ProductPair::Trajectories(&v, &w), &scales, 2.0)?;
    let stat = both(ProductPair::SteadyAndTrajectory(&steady, &w), &scales, 4.0)?;
    let mut parts = Vec::new();
    for (name, vals) in [("trajectories", &traj), ("steady", &stat)] {
        let delta = geometric_decay_exponent(vals).unwrap_or(f64::NAN);
        ensure(delta > 0.2, || {
            format!(
                "{name}: fitted exponent {delta:.3} from {:?}",
                rounded(vals)
            )
        })?;
        parts.push(format!("scale/{name} delta {delta:.3}"));
    }

    // Core separation at equal scale: band-limited dipoles drifting apart. The
    // x-derivative of a Gaussian is mean-free, so nothing survives the separation.
    let g = grid(64, 32.0);
    let dipole = gradient(&gaussian_bump(&g, [0.0; 3], 2.0).ctx("bump")?)
        .ctx("gradient")?
        .select_components(&[0]);
    let bump = band_limit(&dipole, 15);
    let bv = heat_flow(&bump, 1.0, 17)?;
    let offsets = [0.0, 1.0, 2.0, 4.0, 6.0, 8.0];
    let cores: Vec<ScaleCore> = offsets.iter().map(|&c| ScaleCore::new(0, [c; 3])).collect();
    let traj = both(ProductPair::Trajectories(&bv, &bv), &cores, 2.0)?;
    let stat = both(ProductPair::SteadyAndTrajectory(&bump, &bv), &cores, 4.0)?;
    for (name, vals) in [("trajectories", &traj), ("steady", &stat)] {
        ensure(vals.windows(2).all(|w| w[1] < w[0]), || {
            format!("core/{name} not monotone: {:?}", rounded(vals))
        })?;
        parts.push(format!(
            "core/{name} {} -> {}",
            rounded(vals)[0],
            rounded(vals)[count - 1]
        ));
    }
    Ok(parts.join(", "))
}

/// Keep modes with `max_i |k_i| <= kmax`.
fn band_limit(u: &SpectralField, kmax: i64) -> SpectralField {
    let g = u.grid().clone();
    u.apply_symbol(|lin| {
        if g.mode(lin).iter().all(|k| k.abs() <= kmax) {
            1.0
        } else {
            0.0
        }
    })
}

/// Modes of `u` with `lo <= |k| <= hi` in lattice units.
fn shell(u: &SpectralField, lo: f64, hi: f64) -> SpectralField {
    let g = u.grid().clone();
    u.apply_symbol(|lin| {
        let r = (g.k_sq(lin) as f64).sqrt();
        if (lo..=hi).contains(&r) {
            1.0
        } else {
            0.0
        }
    })
}

fn round_trip_family() -> Result<(ProfileSet, f64), String> {
    let g = grid(96, 2.0 * PI * 64.0);
    let h = g.spacing();
    let count = 6;
    let coherent = unit_shell_field(&g, [1.0, 2.0, 1.0, 2.0, 1.0, 2.0], 0.3).ctx("shell")?;
    let small = unit_shell_field(&g, [1.0; 6], 0.3).ctx("shell")?;
    let moving: Vec<ScaleCore> = (0..count)
        .map(|n| ScaleCore::new(4, [h * (8 * n) as f64; 3]))
        .collect();
    let remainders = (0..count as u64)
        .map(|n| {
            let raw = random_band_limited(&g, 3, 70 + n, 8, -1.0, 1.0);
            let r = leray_project(&shell(&raw, 4.2, 7.9)).ctx("leray")?;
            let size = lp_norm(&r, 3.0).ctx("norm")?;
            Ok(r.scale(2e-3 / size))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let set = ProfileSet::new(
        vec![coherent, small],
        vec![vec![ScaleCore::IDENTITY; count], moving],
        remainders,
    )
    .ctx("profile set")?;
    Ok((set, h))
}

fn defect_sweep() -> Result<String, String> {
    let g = grid(96, 512.0);
    let vortex = truncate_for_dilation(&gaussian_vortex(&g, [0.0; 3], 16.0).ctx("vortex")?, 0);
    let offsets = [0.0, 8.0, 16.0, 32.0, 64.0, 128.0, 192.0, 256.0];
    let count = offsets.len();
    let set = ProfileSet::new(
        vec![vortex.clone(), vortex],
        vec![
            vec![ScaleCore::IDENTITY; count],
            offsets.iter().map(|&c| ScaleCore::new(0, [c; 3])).collect(),
        ],
        vec![SpectralField::zeros(&g, 3); count],
    )
    .ctx("defect set")?;
    let mut defects = Vec::new();
    for n in 0..count {
        let phi = synthesize(&set, n).ctx("synthesize")?;
        defects.push((pythagorean_defect(&phi, &set, n).ctx("defect")?.abs(), phi));
    }
    let values: Vec<f64> = defects.iter().map(|d| d.0).collect();
    let last = count - 1;
    // Below this the defect is cancellation noise in the cubed norms.
    let floor = 1e-12 * lp_norm(&defects[last].1, 3.0).ctx("norm")?.powi(3);
    ensure(
        values
            .windows(2)
            .all(|w| w[1] < w[0] || w[0].max(w[1]) <= floor),
        || format!("defect not decreasing: {:?}", rounded(&values)),
    )?;
    let orth = orthogonality_value(
        &set.scale_core_seqs[0],
        &set.scale_core_seqs[1],
        last,
        Some(g.period()),
    );
    let phi_cubed = lp_norm(&defects[last].1, 3.0).ctx("norm")?.powi(3);
    ensure(orth >= 256.0, || format!("final orthogonality {orth:.1}"))?;
    ensure(values[last] <= 1e-3 * phi_cubed, || {
        format!("final defect {:e} vs |phi|^3 {phi_cubed:e}", values[last])
    })?;
    Ok(format!(
        "defect {:.3e} -> {:.3e} (|phi|^3 {phi_cubed:.3e}) at orthogonality {orth:.0}",
        values[0], values[last]
    ))
}

pub fn round_trip() -> Verdict {
    let (truth, h) = round_trip_family()?;
    let seq = (0..truth.len())
        .map(|n| synthesize(&truth, n))
        .collect::<csns_core::Result<Vec<_>>>()
        .ctx("synthesize")?;
    let last = truth.len() - 1;
    let orth = orthogonality_value(
        &truth.scale_core_seqs[0],
        &truth.scale_core_seqs[1],
        last,
        Some(truth.remainder_seq[0].grid().period()),
    );
    ensure(orth >= 256.0, || {
        format!("planted orthogonality only {orth:.1}")
    })?;
    // Stop once the remainder is at the planted level.
    let probe = ExtractionConfig::default();
    let (_, bare) = extract_profiles(
        &seq,
        &ExtractionConfig {
            max_profiles: 0,
            ..probe.clone()
        },
        Some(&truth),
    )
    .ctx("planted level")?;
    let planted_level = bare
        .planted
        .as_ref()
        .map(|p| p.planted_remainder_norm)
        .unwrap_or(0.0);
    let cfg = ExtractionConfig {
        stop_tol: 2.0 * planted_level,
        ..probe
    };
    let (rec, report) = extract_profiles(&seq, &cfg, Some(&truth)).ctx("extract")?;
    let cmp = report.planted.as_ref().ok_or("no planted comparison")?;
    ensure(rec.profile_count() == truth.profile_count(), || {
        format!(
            "recovered {} profiles, planted {}; remainders {:?}",
            rec.profile_count(),
            truth.profile_count(),
            rounded(&report.remainder_norms)
        )
    })?;
    ensure(cmp.scale_errors.iter().all(|&e| e == 0), || {
        format!("scale errors {:?}", cmp.scale_errors)
    })?;
    ensure(cmp.core_errors_cells.iter().all(|&e| e <= 1.0), || {
        format!("core errors {:?} cells", cmp.core_errors_cells)
    })?;
    let final_rem = *report.remainder_norms.last().expect("nonempty");
    ensure(final_rem <= cmp.planted_remainder_norm + 1e-8, || {
        format!(
            "remainder {final_rem:e} above planted {:e}",
            cmp.planted_remainder_norm
        )
    })?;
    let defects = defect_sweep()?;
    Ok(format!(
        "2 profiles, scales exact, cores within {:.2} cells (h = {h:.2}), profile L3 errors {:?}, remainder {final_rem:.3e} vs planted {:.3e}; {defects}",
        cmp.core_errors_cells.iter().copied().fold(0.0, f64::max),
        rounded(&cmp.profile_l3_errors),
        cmp.planted_remainder_norm
    ))
}

pub fn decomposition_of_solutions() -> Verdict {
    let g = grid(32, 2.0 * PI);
    let count = 6;
    let vortex = gaussian_vortex(&g, [PI; 3], 0.6).ctx("vortex")?;
    let phi = truncate_for_dilation(&vortex, 0).scale(0.3);
    let set = ProfileSet::new(
        vec![phi.clone(), phi],
        vec![
            vec![ScaleCore::IDENTITY; count],
            (0..count)
                .map(|n| ScaleCore::new(0, [0.4 * n as f64; 3]))
                .collect(),
        ],
        vec![SpectralField::zeros(&g, 3); count],
    )
    .ctx("profile set")?;
    let pot = unit_shell_field(&g, [1.0, -1.0, 0.5, 0.0, 0.3, -0.2], 0.0)
        .ctx("force shape")?
        .scale(0.01);
    let f = ForceSpec::from_potential(&pot).ctx("force")?;
    let cfg = SolverConfig::new(0.01, 0.3, Stepper::PicardDuhamel);
    let rep = decompose(&set, &f, 0, 4.0, &cfg).ctx("decomposition")?;
    ensure(rep.failure.is_none(), || format!("{:?}", rep.failure))?;
    let j_max = set.profile_count();
    let source = rep.along_n(j_max, |e| e.source_norm);
    ensure(decreasing_up_to_one(&source), || {
        format!("F along n: {:?}", rounded(&source))
    })?;
    for n in 0..count {
        let w = rep.along_j(n, |e| e.w_norm);
        ensure(w.windows(2).all(|x| x[1] < x[0]), || {
            format!("w along J at n = {n}: {:?}", rounded(&w))
        })?;
    }
    let bounded: Vec<_> = rep.entries.iter().filter(|e| e.bound.is_some()).collect();
    ensure(!bounded.is_empty(), || "no entry carries a bound".into())?;
    for e in &bounded {
        ensure(e.bound_holds() == Some(true), || {
            format!(
                "n = {}, J = {}: |r| {:?} above bound {:?}",
                e.n, e.j, e.bound_measured, e.bound
            )
        })?;
    }
    Ok(format!(
        "F along n {:?}, K {:.3}, c1 {:.3e}, bound holds on {} entries",
        rounded(&source),
        rep.k.unwrap_or(f64::NAN),
        rep.c1.unwrap_or(f64::NAN),
        bounded.len()
    ))
}
