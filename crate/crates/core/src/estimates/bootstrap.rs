//! The constant of the local perturbation estimate and the global bound it implies.

use serde::Serialize;

use crate::besov::{
    besov_norm, critical_chemin_lerner, critical_chemin_lerner_on, mixed_space_norm_on, BesovSpec,
    Trajectory,
};
use crate::error::{CsnsError, Result};
use crate::flows::{
    solve_perturbation, split_intervals, PerturbationSolution, PerturbationTerms, SolverConfig,
};
use crate::spectral::SpectralField;

/// Norm in `F = L^p B^{s_p + 2/p - 2}_{p,p} + L^{p/2} B^{s_p + 4/p - 2}_{p,p}`,
/// bounded above by the smaller of the two pure norms.
pub fn forcing_space_norm_on(
    f: &Trajectory,
    range: std::ops::RangeInclusive<usize>,
    p: f64,
) -> Result<f64> {
    let a = critical_chemin_lerner_on(f, range.clone(), p, p, 2.0 / p - 2.0)?;
    let b = critical_chemin_lerner_on(f, range, p / 2.0, p, 4.0 / p - 2.0)?;
    Ok(a.min(b))
}

/// A perturbation run together with its inputs, all on the run's time mesh.
#[derive(Clone, Debug)]
pub struct PerturbationProbe {
    pub w: Trajectory,
    pub drift: Option<Trajectory>,
    pub source: Option<Trajectory>,
    pub steady: Option<SpectralField>,
    pub completed: bool,
}

impl PerturbationProbe {
    pub fn run(
        w0: &SpectralField,
        drift: Option<&Trajectory>,
        steady: Option<&SpectralField>,
        source: Option<&Trajectory>,
        p: f64,
        cfg: &SolverConfig,
    ) -> Result<Self> {
        let terms = PerturbationTerms {
            drift,
            steady,
            source,
        };
        let sol = solve_perturbation(w0, terms, p, cfg)?;
        Self::from_solution(&sol, drift, steady, source)
    }

    pub fn from_solution(
        sol: &PerturbationSolution,
        drift: Option<&Trajectory>,
        steady: Option<&SpectralField>,
        source: Option<&Trajectory>,
    ) -> Result<Self> {
        let w = sol.solution.trajectory.clone();
        let on_mesh = |t: Option<&Trajectory>| t.map(|t| t.resample(w.times())).transpose();
        Ok(Self {
            drift: on_mesh(drift)?,
            source: on_mesh(source)?,
            steady: steady.cloned(),
            completed: sol.solution.completed(),
            w,
        })
    }

    fn is_trivial(&self) -> bool {
        self.w.is_zero()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KMeasurement {
    pub k: f64,
    /// Largest required constant per probe; zero for all-zero probes.
    pub per_probe: Vec<f64>,
    pub c1: f64,
    /// Whether `K c1 < 1/4`.
    pub small_drift_gate: bool,
    pub intervals_evaluated: usize,
    pub trivial_probes: usize,
}

/// Breakpoint indices of a uniform split of `0..len` into `pieces` parts.
fn breakpoints(len: usize, pieces: usize) -> Vec<usize> {
    let last = len - 1;
    let mut b: Vec<usize> = (0..=pieces)
        .map(|i| (i * last + pieces / 2) / pieces)
        .collect();
    b.dedup();
    b
}

/// Constant required on `[alpha, beta]` (sample indices `a..=b`) for
/// `||w||_{L^{p:inf}_p} <= K (||w(alpha)|| + ||f||_F + ||w||^2 + (c1 + ||g||) ||w||)`.
fn required_constant(
    probe: &PerturbationProbe,
    a: usize,
    b: usize,
    p: f64,
    c1: f64,
) -> Result<Option<f64>> {
    let w = &probe.w;
    let lhs = mixed_space_norm_on(w, a..=b, p, f64::INFINITY, p)?;
    if lhs == 0.0 {
        return Ok(None);
    }
    let w_cl = critical_chemin_lerner_on(w, a..=b, p, p, 2.0 / p)?;
    let w_alpha = besov_norm(&w.fields()[a], &BesovSpec::critical(p, 0.0, w.window())?)?;
    let f_norm = match &probe.source {
        Some(f) => forcing_space_norm_on(f, a..=b, p)?,
        None => 0.0,
    };
    let g_norm = match &probe.drift {
        Some(g) => critical_chemin_lerner_on(g, a..=b, p, p, 2.0 / p)?,
        None => 0.0,
    };
    let rhs = w_alpha + f_norm + w_cl * w_cl + (c1 + g_norm) * w_cl;
    Ok(Some(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY }))
}

/// Smallest `K` for which the local estimate holds on every probe and every
/// interval between `pieces + 1` uniform breakpoints. All-zero probes are skipped.
pub fn measure_k(
    probes: &[PerturbationProbe],
    p: f64,
    c1: f64,
    pieces: usize,
) -> Result<KMeasurement> {
    if probes.is_empty() {
        return Err(CsnsError::Precondition(
            "K measurement needs at least one probe".into(),
        ));
    }
    if pieces == 0 {
        return Err(CsnsError::Precondition("need at least one piece".into()));
    }
    let mut per_probe = Vec::with_capacity(probes.len());
    let mut evaluated = 0;
    let mut trivial = 0;
    for probe in probes {
        if probe.w.len() < 2 {
            return Err(CsnsError::Precondition(
                "probe run has fewer than two samples".into(),
            ));
        }
        if probe.is_trivial() {
            trivial += 1;
            per_probe.push(0.0);
            continue;
        }
        let pts = breakpoints(probe.w.len(), pieces);
        let mut worst: f64 = 0.0;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                if let Some(k) = required_constant(probe, a, b, p, c1)? {
                    worst = worst.max(k);
                }
                evaluated += 1;
            }
        }
        per_probe.push(worst);
    }
    let k = per_probe.iter().copied().fold(0.0, f64::max);
    Ok(KMeasurement {
        k,
        per_probe,
        c1,
        small_drift_gate: k * c1 < 0.25,
        intervals_evaluated: evaluated,
        trivial_probes: trivial,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationBound {
    pub k: f64,
    pub p: f64,
    /// Number of breakpoints `N` of the drift splitting at threshold `1/(4K)`.
    pub pieces: usize,
    pub g_norm: f64,
    /// `||w0||_{B^{s_p}_{p,p}} + ||f||_F`.
    pub data_norm: f64,
    /// `1 / (8 K N (4K)^N)`.
    pub gate_threshold: f64,
    pub gate_met: bool,
    /// `N (4K)^N data_norm`.
    pub bound: f64,
    /// `||w||_{L^p B^{s_p + 2/p}_{p,p}}` over the run.
    pub measured: f64,
    pub slack: f64,
    pub piece_threshold: f64,
    pub w_piece_norms: Vec<f64>,
    pub pieces_within_threshold: bool,
}

/// Evaluate the smallness gate and the bound `N (4K)^N (||w0|| + ||f||_F)` on a completed run.
pub fn verify_perturbation_bound(
    probe: &PerturbationProbe,
    p: f64,
    k: f64,
) -> Result<PerturbationBound> {
    if !probe.completed {
        return Err(CsnsError::Precondition(
            "perturbation run did not complete".into(),
        ));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(CsnsError::Precondition(format!(
            "K must be positive and finite, got {k}"
        )));
    }
    let w = &probe.w;
    let zero_drift;
    let g = match &probe.drift {
        Some(g) => g,
        None => {
            zero_drift =
                Trajectory::constant(&SpectralField::zeros(w.grid(), 3), w.times().to_vec())?;
            &zero_drift
        }
    };
    let threshold = 1.0 / (4.0 * k);
    let schedule = split_intervals(g, p, threshold)?;
    let n = schedule.count();
    let g_norm = critical_chemin_lerner(g, p, p, 2.0 / p)?;
    let w0_norm = besov_norm(w.first(), &BesovSpec::critical(p, 0.0, w.window())?)?;
    let f_norm = match &probe.source {
        Some(f) => forcing_space_norm_on(f, 0..=f.len() - 1, p)?,
        None => 0.0,
    };
    let data_norm = w0_norm + f_norm;
    let growth = (4.0 * k).powi(n as i32);
    let gate_threshold = 1.0 / (8.0 * k * n as f64 * growth);
    let bound = n as f64 * growth * data_norm;
    let measured = critical_chemin_lerner(w, p, p, 2.0 / p)?;
    let mut w_piece_norms = Vec::with_capacity(n.saturating_sub(1));
    for pair in schedule.sample_indices.windows(2) {
        w_piece_norms.push(critical_chemin_lerner_on(
            w,
            pair[0]..=pair[1],
            p,
            p,
            2.0 / p,
        )?);
    }
    let pieces_within_threshold = w_piece_norms.iter().all(|&x| x <= threshold);
    Ok(PerturbationBound {
        k,
        p,
        pieces: n,
        g_norm,
        data_norm,
        gate_threshold,
        gate_met: data_norm <= gate_threshold,
        bound,
        measured,
        slack: bound - measured,
        piece_threshold: threshold,
        w_piece_norms,
        pieces_within_threshold,
    })
}

/// Least-squares slope of `ln(bound)` against `||g||`.
pub fn log_bound_slope(bounds: &[PerturbationBound]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = bounds
        .iter()
        .filter(|b| b.bound > 0.0)
        .map(|b| (b.g_norm, b.bound.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (den > 0.0).then(|| num / den)
}
