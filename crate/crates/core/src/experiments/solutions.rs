//! Profile decomposition of forced solutions built from planted data.
//!
//! Data `u_{0,n} = sum_j Lambda_{j,n} phi_j + psi_n` is evolved by the forced
//! equation and compared with the rescaled profile solutions plus the heat
//! flow of the remainder. Profiles are rescaled with the Navier-Stokes
//! amplitude, so that the comparison is between solutions; see [`ns_rescale`].
//!
//! [`ns_rescale`]: super::frames::ns_rescale

use std::collections::BTreeMap;

use serde::Serialize;

use super::frames::{ns_rescale, ns_rescale_inverse_trajectory};
use crate::besov::{critical_chemin_lerner, mixed_space_norm, Trajectory};
use crate::error::{CsnsError, Result};
use crate::estimates::{
    forcing_space_norm_on, measure_k, verify_perturbation_bound, PerturbationProbe,
};
use crate::flows::{
    drift_smallness_check, solve_ns, solve_nsf_with_steady, solve_steady_state, MildSolution,
    SolverConfig,
};
use crate::profiles::{apply_lambda_inverse_projecting, ProfileSet, ScaleCore};
use crate::spectral::{heat_semigroup, nonlinear_q, ForceSpec, SpectralField};

/// Uniform pieces per run used when fitting `K`.
const K_PIECES: usize = 4;

/// `min_{j in I} 4^{-m_j} T_j` and the order sorting `4^{-m_j} T_j` ascending.
///
/// Each entry is `(m_j, Some(T_j))` for a profile in the blow-up set and
/// `(m_j, None)` otherwise (infinite key). Ties keep the input order.
/// Multiplying by a power of two is exact in binary floating point, so the
/// keys are the exact rescaled lifespans of the given `T_j`.
pub fn rescaled_lifespans(pairs: &[(i32, Option<f64>)]) -> (Option<f64>, Vec<usize>) {
    let keys: Vec<f64> = pairs
        .iter()
        .map(|&(m, t)| t.map_or(f64::INFINITY, |t| t * 4f64.powi(-m)))
        .collect();
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let tau = keys
        .iter()
        .copied()
        .filter(|k| k.is_finite())
        .reduce(f64::min);
    (tau, order)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRunSummary {
    pub profile: usize,
    pub forced: bool,
    pub completed: bool,
    /// Final time in the profile's own frame.
    pub final_time: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionsEntry {
    pub n: usize,
    /// Number of profiles subtracted.
    pub j: usize,
    /// Samples used, all with `t <= tau_n`.
    pub samples: usize,
    /// `||w^J_n||` in `L^{1:inf}_p`.
    pub w_norm: f64,
    /// `||r^J_n||` in `L^{p:inf}_p` up to `tau_n`.
    pub r_norm: f64,
    /// `||G^{J,1}_n||` in `L^p_t B^{s_p + 2/p}_{p,p}`.
    pub drift_norm: f64,
    /// `||F^{J,1}_n||_F`.
    pub source_norm: f64,
    /// Global bound `N (4K)^N ||F||_F` on `||R^{J,1}_n||` in `L^p_t B^{s_p + 2/p}_{p,p}`.
    pub bound: Option<f64>,
    pub bound_measured: Option<f64>,
    pub bound_pieces: Option<usize>,
    pub gate_met: Option<bool>,
    pub note: Option<String>,
}

impl SolutionsEntry {
    pub fn bound_holds(&self) -> Option<bool> {
        Some(self.bound_measured? <= self.bound?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionOfSolutionsReport {
    pub p: f64,
    pub j0: usize,
    pub horizon: f64,
    pub profile_runs: Vec<ProfileRunSummary>,
    /// Profiles whose runs stopped before their horizon.
    pub blowup_set: Vec<usize>,
    /// Own-frame lifespan proxy per profile (`None`: completed every run).
    pub lifespans: Vec<Option<f64>>,
    pub tau: Vec<Option<f64>>,
    pub permutations: Vec<Vec<usize>>,
    pub solution_completed: Vec<bool>,
    pub k: Option<f64>,
    pub c1: Option<f64>,
    pub entries: Vec<SolutionsEntry>,
    pub failure: Option<StageFailure>,
}

impl DecompositionOfSolutionsReport {
    pub fn entry(&self, j: usize, n: usize) -> Option<&SolutionsEntry> {
        self.entries.iter().find(|e| e.j == j && e.n == n)
    }

    /// `value(entry)` along `n` at fixed `J`.
    pub fn along_n(&self, j: usize, value: impl Fn(&SolutionsEntry) -> f64) -> Vec<f64> {
        let mut v: Vec<&SolutionsEntry> = self.entries.iter().filter(|e| e.j == j).collect();
        v.sort_by_key(|e| e.n);
        v.into_iter().map(value).collect()
    }

    /// `value(entry)` along `J` at fixed `n`.
    pub fn along_j(&self, n: usize, value: impl Fn(&SolutionsEntry) -> f64) -> Vec<f64> {
        let mut v: Vec<&SolutionsEntry> = self.entries.iter().filter(|e| e.n == n).collect();
        v.sort_by_key(|e| e.j);
        v.into_iter().map(value).collect()
    }

    /// CSV with header `n,j,w_norm,r_norm,drift_norm,source_norm,bound,bound_measured`.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        let mut s = String::from("n,j,w_norm,r_norm,drift_norm,source_norm,bound,bound_measured\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{:?},{:?},{:?},{:?},{},{}\n",
                e.n,
                e.j,
                e.w_norm,
                e.r_norm,
                e.drift_norm,
                e.source_norm,
                opt(e.bound),
                opt(e.bound_measured)
            ));
        }
        s
    }
}

fn check_inputs(planted: &ProfileSet, f: &ForceSpec, j0: usize, p: f64) -> Result<()> {
    planted.validate()?;
    if !(p > 3.0 && p < 5.0) {
        return Err(CsnsError::Precondition(format!(
            "decomposition of solutions needs 3 < p < 5, got {p}"
        )));
    }
    if j0 >= planted.profile_count() {
        return Err(CsnsError::Precondition(format!(
            "j0 = {j0} but only {} profiles",
            planted.profile_count()
        )));
    }
    let period = planted.remainder_seq[0].grid().period();
    if planted.scale_core_seqs[j0]
        .iter()
        .any(|sc| sc.reduced(period) != ScaleCore::IDENTITY)
    {
        return Err(CsnsError::Precondition(format!(
            "profile j0 = {j0} must carry the identity scale-core sequence"
        )));
    }
    for (i, u) in planted
        .profiles
        .iter()
        .chain(&planted.remainder_seq)
        .enumerate()
    {
        if u.ncomp() != 3 {
            return Err(CsnsError::Precondition(format!(
                "field {i} of the planted set is not a velocity field"
            )));
        }
    }
    planted.remainder_seq[0].check_same_grid(f.potential())
}

fn heat_flow(u: &SpectralField, times: &[f64]) -> Result<Trajectory> {
    let fields = times
        .iter()
        .map(|&t| heat_semigroup(u, t))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), fields)
}

fn sum_all(parts: &[&Trajectory], times: &[f64], grid_field: &SpectralField) -> Result<Trajectory> {
    let mut acc =
        Trajectory::constant(&SpectralField::zeros(grid_field.grid(), 3), times.to_vec())?;
    for part in parts {
        acc = acc.zip_map(part, |a, b| a.add(b))?;
    }
    Ok(acc)
}

/// Samples `0..len` of a trajectory, resampled onto `times` when the meshes differ.
fn on_mesh(tr: &Trajectory, times: &[f64]) -> Result<Trajectory> {
    if tr.times().len() >= times.len() && tr.times()[..times.len()] == *times {
        tr.slice(0..=times.len() - 1)
    } else {
        tr.resample(times)
    }
}

struct Frame {
    sc: ScaleCore,
}

impl Frame {
    fn map(&self, tr: &Trajectory) -> Result<Trajectory> {
        ns_rescale_inverse_trajectory(tr, self.sc)
    }

    fn map_field(&self, u: &SpectralField) -> Result<SpectralField> {
        if self.sc == ScaleCore::IDENTITY {
            return Ok(u.clone());
        }
        Ok(apply_lambda_inverse_projecting(u, self.sc)?.scale(self.sc.lambda()))
    }
}

pub fn decomposition_of_solutions(
    planted: &ProfileSet,
    f: &ForceSpec,
    j0: usize,
    p: f64,
    cfg: &SolverConfig,
) -> Result<DecompositionOfSolutionsReport> {
    check_inputs(planted, f, j0, p)?;
    cfg.validate()?;
    let grid_ref = planted.remainder_seq[0].clone();
    let count = planted.profile_count();
    let steady = if f.is_zero() {
        SpectralField::zeros(grid_ref.grid(), 3)
    } else {
        solve_steady_state(f, 1e-13)?
    };
    let mut report = DecompositionOfSolutionsReport {
        p,
        j0,
        horizon: cfg.t_end,
        profile_runs: Vec::new(),
        blowup_set: Vec::new(),
        lifespans: vec![None; count],
        tau: Vec::new(),
        permutations: Vec::new(),
        solution_completed: Vec::new(),
        k: None,
        c1: None,
        entries: Vec::new(),
        failure: None,
    };

    // Profile solutions in their own frames; they fix the lifespan proxies,
    // and the forced one is U^{j0} itself.
    let mut profile_runs: BTreeMap<usize, MildSolution> = BTreeMap::new();
    for j in 0..count {
        let outcome = if j == j0 {
            solve_nsf_with_steady(&planted.profiles[j], f, &steady, p, cfg)
        } else {
            solve_ns(&planted.profiles[j], cfg)
        };
        let run = match outcome {
            Ok(run) => run,
            Err(e) => {
                report.failure = Some(StageFailure {
                    stage: format!("profile {j}"),
                    message: e.to_string(),
                });
                return Ok(report);
            }
        };
        if !run.completed() {
            report.lifespans[j] = Some(run.final_time);
        }
        report.profile_runs.push(ProfileRunSummary {
            profile: j,
            forced: j == j0,
            completed: run.completed(),
            final_time: run.final_time,
        });
        profile_runs.insert(j, run);
    }
    report.blowup_set = (0..count)
        .filter(|&j| report.lifespans[j].is_some())
        .collect();

    let mut probes: Vec<(usize, PerturbationProbe)> = Vec::new();
    let mut c1: f64 = 0.0;
    for n in 0..planted.len() {
        let scs: Vec<ScaleCore> = (0..count).map(|j| planted.scale_core_seqs[j][n]).collect();
        let pairs: Vec<(i32, Option<f64>)> = (0..count)
            .map(|j| (scs[j].exponent, report.lifespans[j]))
            .collect();
        let (tau, order) = rescaled_lifespans(&pairs);
        report.tau.push(tau);
        report.permutations.push(order.clone());

        match decompose_index(
            planted,
            f,
            &steady,
            j0,
            p,
            cfg,
            n,
            &scs,
            tau,
            &order,
            &profile_runs,
        ) {
            Ok(done) => {
                report.solution_completed.push(done.completed);
                for (entry, probe) in done.entries {
                    if let Some(probe) = probe {
                        if !probe.w.is_zero() {
                            let steady_frame =
                                probe.steady.clone().unwrap_or_else(|| steady.clone());
                            c1 = c1.max(drift_smallness_check(
                                &steady_frame,
                                std::slice::from_ref(&probe.w),
                                p,
                            )?);
                        }
                        probes.push((report.entries.len(), probe));
                    }
                    report.entries.push(entry);
                }
            }
            Err(e) => {
                report.failure = Some(StageFailure {
                    stage: format!("sequence index {n}"),
                    message: e.to_string(),
                });
                return Ok(report);
            }
        }
    }

    // One constant for every (J, n), then the global bound per entry.
    let all: Vec<PerturbationProbe> = probes.iter().map(|(_, pr)| pr.clone()).collect();
    if !all.is_empty() {
        let measured = measure_k(&all, p, c1, K_PIECES)?.k;
        let k = if measured > 0.0 { measured } else { 1.0 };
        report.k = Some(k);
        report.c1 = Some(c1);
        for (idx, probe) in &probes {
            let entry = &mut report.entries[*idx];
            match verify_perturbation_bound(probe, p, k) {
                Ok(b) => {
                    entry.bound = Some(b.bound);
                    entry.bound_measured = Some(b.measured);
                    entry.bound_pieces = Some(b.pieces);
                    entry.gate_met = Some(b.gate_met);
                }
                Err(e) => entry.note = Some(e.to_string()),
            }
        }
    }
    Ok(report)
}

struct IndexOutcome {
    completed: bool,
    entries: Vec<(SolutionsEntry, Option<PerturbationProbe>)>,
}

#[allow(clippy::too_many_arguments)]
fn decompose_index(
    planted: &ProfileSet,
    f: &ForceSpec,
    steady: &SpectralField,
    j0: usize,
    p: f64,
    cfg: &SolverConfig,
    n: usize,
    scs: &[ScaleCore],
    tau: Option<f64>,
    order: &[usize],
    profile_runs: &BTreeMap<usize, MildSolution>,
) -> Result<IndexOutcome> {
    let count = planted.profile_count();
    let images = (0..count)
        .map(|j| ns_rescale(&planted.profiles[j], scs[j]))
        .collect::<Result<Vec<_>>>()?;
    let mut u0 = planted.remainder_seq[n].clone();
    for img in &images {
        u0.add_scaled(1.0, img)?;
    }
    u0.set_divergence_free(true);
    let run = solve_nsf_with_steady(&u0, f, steady, p, cfg)?;

    // Common mesh: every sample of u_n also present in each rescaled profile,
    // and no later than tau_n.
    // Lambda_{j,n} U^j is the solution from the rescaled data on the u_n
    // mesh. By the scaling symmetry this is the rescaled profile solution,
    // resolved exactly as u_n resolves it.
    let rescaled = (0..count)
        .map(|j| {
            if j == j0 {
                Ok(profile_runs[&j].trajectory.clone())
            } else {
                Ok(solve_ns(&images[j], cfg)?.trajectory)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = rescaled
        .iter()
        .map(|r| r.t_end())
        .fold(run.trajectory.t_end(), f64::min)
        .min(tau.unwrap_or(f64::INFINITY));
    let tol = 1e-12 * cfg.t_end.max(1.0);
    let times: Vec<f64> = run
        .trajectory
        .times()
        .iter()
        .copied()
        .filter(|&t| t <= limit + tol)
        .collect();
    if times.len() < 2 {
        return Err(CsnsError::Solver(format!(
            "fewer than two common samples before t = {limit}"
        )));
    }
    let u = on_mesh(&run.trajectory, &times)?;
    let profiles = rescaled
        .iter()
        .map(|r| on_mesh(r, &times))
        .collect::<Result<Vec<_>>>()?;

    let frame = Frame { sc: scs[order[0]] };
    let steady_frame = frame.map_field(steady)?;
    let profiles_frame = profiles
        .iter()
        .map(|t| frame.map(t))
        .collect::<Result<Vec<_>>>()?;
    let frame_times = profiles_frame[0].times().to_vec();

    let mut entries = Vec::new();
    for jc in (j0 + 1)..=count {
        let mut psi = u0.clone();
        for img in &images[..jc] {
            psi = psi.sub(img)?;
        }
        let w = heat_flow(&psi, &times)?;
        let mut parts: Vec<&Trajectory> = profiles[..jc].iter().collect();
        parts.push(&w);
        let approx = sum_all(&parts, &times, &u0)?;
        let r = u.zip_map(&approx, |a, b| a.sub(b))?;
        let w_norm = mixed_space_norm(&w, 1.0, f64::INFINITY, p)?;
        let r_norm = mixed_space_norm(&r, p, f64::INFINITY, p)?;

        // Frame of the first profile in the lifespan order.
        let w1 = frame.map(&w)?;
        let r1 = frame.map(&r)?;
        let v0 = profiles_frame[j0].map(|x| x.sub(&steady_frame))?;
        let mut drift_parts: Vec<&Trajectory> = (0..jc)
            .filter(|&j| j != j0)
            .map(|j| &profiles_frame[j])
            .collect();
        drift_parts.push(&w1);
        drift_parts.push(&v0);
        let g = sum_all(&drift_parts, &frame_times, &u0)?;

        // F = -Q(W,W)/2 - sum_{j<j'} Q(U^j, U^j') - sum_j Q(U^j, W).
        let mut source = w1.map(|x| Ok(nonlinear_q(x, x)?.scale(-0.5)))?;
        for a in 0..jc {
            for b in a + 1..jc {
                let cross = profiles_frame[a].zip_map(&profiles_frame[b], nonlinear_q)?;
                source = source.zip_map(&cross, |s, c| s.sub(c))?;
            }
            let with_w = profiles_frame[a].zip_map(&w1, nonlinear_q)?;
            source = source.zip_map(&with_w, |s, c| s.sub(c))?;
        }
        let drift_norm = critical_chemin_lerner(&g, p, p, 2.0 / p)?;
        let source_norm = forcing_space_norm_on(&source, 0..=source.len() - 1, p)?;
        let probe = PerturbationProbe {
            w: r1,
            drift: Some(g),
            source: Some(source),
            steady: Some(steady_frame.clone()),
            completed: run.completed(),
        };
        entries.push((
            SolutionsEntry {
                n,
                j: jc,
                samples: times.len(),
                w_norm,
                r_norm,
                drift_norm,
                source_norm,
                bound: None,
                bound_measured: None,
                bound_pieces: None,
                gate_met: None,
                note: None,
            },
            Some(probe),
        ));
    }
    Ok(IndexOutcome {
        completed: run.completed(),
        entries,
    })
}
