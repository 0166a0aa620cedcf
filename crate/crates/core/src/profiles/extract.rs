//! Greedy profile extraction driven by a Besov concentration detector.

use serde::{Deserialize, Serialize};

use super::lambda::{apply_lambda, apply_lambda_inverse_projecting};
use super::scale_core::{core_distance, orthogonality_value, ScaleCore};
use super::set::{pythagorean_defect, ProfileSet};
use crate::besov::{
    besov_norm, critical_regularity, dyadic_block, lp_norm, BesovSpec, DyadicWindow,
};
use crate::error::{CsnsError, Result};
use crate::spectral::rescale::{contract, lattice_exponent};
use crate::spectral::SpectralField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub max_profiles: usize,
    /// Stop once `max_n ||psi_n||_{B^{s_p}_{p,p}}` is at most this.
    pub stop_tol: f64,
    pub p: f64,
    /// Inputs with `sup_n ||phi_n||_{L^3}` above this are rejected.
    pub l3_bound: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            max_profiles: 4,
            stop_tol: 1e-6,
            p: 4.0,
            l3_bound: 1e6,
        }
    }
}

/// Location and dyadic index of the largest weighted block value `2^{j s_p} |Delta_j u(x)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Concentration {
    pub block: i32,
    pub location: [f64; 3],
    pub value: f64,
}

/// Scan every block of `u`. A block supported on `2^a Z^3` is periodic with
/// period `L / 2^a` and is searched over one period at full resolution.
pub fn locate_concentration(
    u: &SpectralField,
    window: &DyadicWindow,
    p: f64,
) -> Option<Concentration> {
    let sp = critical_regularity(p);
    let grid = u.grid();
    let mut best: Option<Concentration> = None;
    for j in window.indices() {
        let block = dyadic_block(u, j, window).field;
        let Some(a) = lattice_exponent(&block) else {
            continue;
        };
        let reduced = if a > 0 {
            contract(&block, a, [0.0; 3], true).expect("lattice support")
        } else {
            block
        };
        let phys = reduced.to_physical();
        let (mut arg, mut peak) = (0, 0.0);
        for (i, m) in phys.magnitude().into_iter().enumerate() {
            if m > peak {
                peak = m;
                arg = i;
            }
        }
        let value = 2f64.powf(j as f64 * sp) * peak;
        if best.is_none_or(|b| value > b.value) {
            let idx = grid.split_index(arg);
            let shrink = 2f64.powi(-(a as i32));
            let location = [0, 1, 2].map(|d| grid.coordinate(idx[d]) * shrink);
            best = Some(Concentration {
                block: j,
                location,
                value,
            });
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tolerance,
    MaxProfiles,
    /// The remainder failed to decrease for three consecutive rounds.
    Stalled,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairOrthogonality {
    pub first: usize,
    pub second: usize,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlantedComparison {
    /// Per recovered profile: largest `|m_rec - m_planted|` over `n`.
    pub scale_errors: Vec<i32>,
    /// Per recovered profile: largest core error over `n`, in grid cells, measured
    /// modulo the period `lambda L` of the rescaled profile.
    pub core_errors_cells: Vec<f64>,
    /// Per recovered profile: `||phi_rec - phi_planted||_{L^3} / ||phi_planted||_{L^3}`.
    pub profile_l3_errors: Vec<f64>,
    /// `max_n` Besov norm of the planted remainders.
    pub planted_remainder_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    /// `max_n ||psi^J_n||_{B^{s_p}_{p,p}}` for `J = 0, 1, ...` extracted profiles.
    pub remainder_norms: Vec<f64>,
    /// Pythagorean defect per `n` for the extracted set.
    pub defects: Vec<f64>,
    pub orthogonality: Vec<PairOrthogonality>,
    pub reference_block: Option<i32>,
    pub stop_reason: StopReason,
    pub planted: Option<PlantedComparison>,
    pub p: f64,
}

impl DecompositionReport {
    /// CSV of per-`n` defects with header `n,defect`.
    pub fn defects_csv(&self) -> String {
        let mut s = String::from("n,defect\n");
        for (n, d) in self.defects.iter().enumerate() {
            s.push_str(&format!("{n},{d:?}\n"));
        }
        s
    }
}

/// Keep modes with `2^j <= |xi| <= 2^{j+2}`, the closed support of `Delta_j`.
fn restrict_to_block_support(u: &SpectralField, j: i32) -> SpectralField {
    let grid = u.grid();
    let (lo, hi) = (2f64.powi(j), 2f64.powi(j + 2));
    let mut out = u.apply_symbol(|lin| {
        let r = grid.xi_abs(lin);
        if r >= lo && r <= hi {
            1.0
        } else {
            0.0
        }
    });
    out.set_divergence_free(u.is_divergence_free());
    out
}

fn remainder_norm(rs: &[SpectralField], spec: &BesovSpec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in rs {
        worst = worst.max(besov_norm(r, spec)?);
    }
    Ok(worst)
}

/// Greedy extraction:
/// 1. find `(j*, x*)` maximizing `2^{j s_p} |Delta_j psi_n(x)|` for each `n`;
/// 2. the first profile gets the scale-core `(1, 0)` and fixes the reference
///    block `j_ref`; later ones get `(2^{-(j* - j_ref)}, x*)`;
/// 3. the profile is the mean over the last `ceil(n_max / 2)` indices of the
///    inversely rescaled remainders, restricted to the support of `Delta_{j_ref}`;
/// 4. its rescaled images are subtracted and the loop repeats.
pub fn extract_profiles(
    seq: &[SpectralField],
    cfg: &ExtractionConfig,
    planted: Option<&ProfileSet>,
) -> Result<(ProfileSet, DecompositionReport)> {
    let first = seq
        .first()
        .ok_or_else(|| CsnsError::Precondition("extraction needs a nonempty sequence".into()))?;
    let grid = first.grid().clone();
    let mut sup_l3: f64 = 0.0;
    for f in seq {
        f.check_same_grid(first)?;
        sup_l3 = sup_l3.max(lp_norm(f, 3.0)?);
    }
    if !(sup_l3 <= cfg.l3_bound) {
        return Err(CsnsError::Precondition(format!(
            "sequence is not bounded in L3 (sup {sup_l3:e} > {:e})",
            cfg.l3_bound
        )));
    }
    let window = DyadicWindow::for_grid(&grid);
    let spec = BesovSpec::critical(cfg.p, 0.0, window)?;
    let n_count = seq.len();
    let n_max = n_count - 1;
    let tail_len = n_max.div_ceil(2).max(1);
    let tail = n_count - tail_len..n_count;

    let mut remainders: Vec<SpectralField> = seq.to_vec();
    let mut profiles = Vec::new();
    let mut seqs: Vec<Vec<ScaleCore>> = Vec::new();
    let mut norms = vec![remainder_norm(&remainders, &spec)?];
    let mut reference: Option<i32> = None;
    let mut stalls = 0;
    let stop_reason = loop {
        let current = *norms.last().expect("nonempty");
        if current <= cfg.stop_tol {
            break StopReason::Tolerance;
        }
        if profiles.len() >= cfg.max_profiles {
            break StopReason::MaxProfiles;
        }
        let detections: Vec<Option<Concentration>> = remainders
            .iter()
            .map(|r| locate_concentration(r, &window, cfg.p))
            .collect();
        let j_ref = match reference {
            Some(j) => j,
            None => match detections[n_max] {
                Some(d) => d.block,
                None => break StopReason::Tolerance,
            },
        };
        let scale_cores: Vec<ScaleCore> = if reference.is_none() {
            vec![ScaleCore::IDENTITY; n_count]
        } else {
            detections
                .iter()
                .map(|d| {
                    d.map_or(ScaleCore::IDENTITY, |d| {
                        ScaleCore::new(d.block - j_ref, d.location)
                    })
                })
                .collect()
        };
        let mut candidate = SpectralField::zeros(&grid, first.ncomp());
        for n in tail.clone() {
            let base = match apply_lambda_inverse_projecting(&remainders[n], scale_cores[n]) {
                Ok(b) => b,
                Err(CsnsError::SupportViolation(_)) => continue,
                Err(e) => return Err(e),
            };
            candidate.add_scaled(1.0, &restrict_to_block_support(&base, j_ref))?;
        }
        candidate = candidate.scale(1.0 / tail_len as f64);
        if first.ncomp() == 3 && candidate.divergence_residual() < 1e-12 {
            candidate.set_divergence_free(true);
        }
        let mut next = Vec::with_capacity(n_count);
        for (r, sc) in remainders.iter().zip(&scale_cores) {
            next.push(r.sub(&apply_lambda(&candidate, *sc)?)?);
        }
        if candidate.is_zero() {
            break StopReason::Stalled;
        }
        let next_norm = remainder_norm(&next, &spec)?;
        stalls = if next_norm >= current { stalls + 1 } else { 0 };
        reference.get_or_insert(j_ref);
        profiles.push(candidate);
        seqs.push(scale_cores);
        remainders = next;
        norms.push(next_norm);
        if stalls >= 3 {
            break StopReason::Stalled;
        }
    };

    let set = ProfileSet {
        profiles,
        scale_core_seqs: seqs,
        remainder_seq: remainders,
    };
    let defects = if set.profiles.is_empty() {
        vec![0.0; n_count]
    } else {
        (0..n_count)
            .map(|n| pythagorean_defect(&seq[n], &set, n))
            .collect::<Result<Vec<_>>>()?
    };
    let period = Some(grid.period());
    let mut orthogonality = Vec::new();
    for a in 0..set.scale_core_seqs.len() {
        for b in a + 1..set.scale_core_seqs.len() {
            let values = (0..n_count)
                .map(|n| {
                    orthogonality_value(&set.scale_core_seqs[a], &set.scale_core_seqs[b], n, period)
                })
                .collect();
            orthogonality.push(PairOrthogonality {
                first: a,
                second: b,
                values,
            });
        }
    }
    let planted = planted
        .map(|truth| compare_with_planted(&set, truth, &spec))
        .transpose()?;
    let report = DecompositionReport {
        remainder_norms: norms,
        defects,
        orthogonality,
        reference_block: reference,
        stop_reason,
        planted,
        p: cfg.p,
    };
    Ok((set, report))
}

fn compare_with_planted(
    rec: &ProfileSet,
    truth: &ProfileSet,
    spec: &BesovSpec,
) -> Result<PlantedComparison> {
    let grid = truth.remainder_seq[0].grid();
    let h = grid.spacing();
    let mut scale_errors = Vec::new();
    let mut core_errors = Vec::new();
    let mut profile_errors = Vec::new();
    for (j, (phi, seq)) in rec.profiles.iter().zip(&rec.scale_core_seqs).enumerate() {
        let Some(truth_seq) = truth.scale_core_seqs.get(j) else {
            break;
        };
        let mut se = 0;
        let mut ce: f64 = 0.0;
        for (a, b) in seq.iter().zip(truth_seq) {
            se = se.max((a.exponent - b.exponent).abs());
            let tile = grid.period() * b.lambda().min(1.0);
            ce = ce.max(core_distance(a.core, b.core, Some(tile)) / h);
        }
        scale_errors.push(se);
        core_errors.push(ce);
        let planted = &truth.profiles[j];
        profile_errors.push(lp_norm(&phi.sub(planted)?, 3.0)? / lp_norm(planted, 3.0)?);
    }
    Ok(PlantedComparison {
        scale_errors,
        core_errors_cells: core_errors,
        profile_l3_errors: profile_errors,
        planted_remainder_norm: remainder_norm(&truth.remainder_seq, spec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::families::unit_shell_field;
    use crate::profiles::set::synthesize;
    use crate::spectral::PeriodicGrid;
    use std::f64::consts::PI;

    fn planted(n_count: usize) -> ProfileSet {
        let g = PeriodicGrid::new(48, 2.0 * PI).unwrap();
        let h = g.spacing();
        let phi1 = unit_shell_field(&g, [1.0, 2.0, 1.0, 2.0, 1.0, 2.0], 0.3).unwrap();
        let phi2 = unit_shell_field(&g, [1.0; 6], 0.3).unwrap();
        let cores: Vec<ScaleCore> = (0..n_count)
            .map(|n| ScaleCore::new(3, [(5 * n + 1) as f64 * h; 3]))
            .collect();
        let zeros = vec![SpectralField::zeros(&g, 3); n_count];
        ProfileSet::new(
            vec![phi1, phi2],
            vec![vec![ScaleCore::IDENTITY; n_count], cores],
            zeros,
        )
        .unwrap()
    }

    #[test]
    fn recovers_planted_scales_and_cores() {
        let truth = planted(5);
        let seq: Vec<SpectralField> = (0..5).map(|n| synthesize(&truth, n).unwrap()).collect();
        let cfg = ExtractionConfig {
            stop_tol: 1e-10,
            ..Default::default()
        };
        let (set, report) = extract_profiles(&seq, &cfg, Some(&truth)).unwrap();
        assert_eq!(report.stop_reason, StopReason::Tolerance);
        assert_eq!(set.profile_count(), 2);
        assert_eq!(report.reference_block, Some(-1));
        let cmp = report.planted.as_ref().unwrap();
        assert_eq!(cmp.scale_errors, vec![0, 0]);
        assert!(
            cmp.core_errors_cells.iter().all(|&c| c <= 1.0),
            "{:?}",
            cmp.core_errors_cells
        );
        assert!(
            cmp.profile_l3_errors.iter().all(|&e| e < 1e-12),
            "{:?}",
            cmp.profile_l3_errors
        );
        assert!(*report.remainder_norms.last().unwrap() < 1e-10);
        assert!(report.remainder_norms.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn zero_sequence_stops_immediately() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let seq = vec![SpectralField::zeros(&g, 3); 3];
        let (set, report) = extract_profiles(&seq, &ExtractionConfig::default(), None).unwrap();
        assert!(set.profiles.is_empty());
        assert_eq!(report.stop_reason, StopReason::Tolerance);
        assert_eq!(report.defects, vec![0.0; 3]);
    }

    #[test]
    fn unbounded_sequence_is_rejected() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let u = unit_shell_field(&g, [1.0; 6], 0.3).unwrap().scale(1e9);
        let err = extract_profiles(&[u], &ExtractionConfig::default(), None).unwrap_err();
        assert!(matches!(err, CsnsError::Precondition(_)));
    }

    #[test]
    fn detector_finds_dilated_peak() {
        let g = PeriodicGrid::new(32, 2.0 * PI).unwrap();
        let h = g.spacing();
        let u = unit_shell_field(&g, [1.0; 6], 0.3).unwrap();
        let v = apply_lambda(&u, ScaleCore::new(2, [3.0 * h, 3.0 * h, 3.0 * h])).unwrap();
        let c = locate_concentration(&v, &DyadicWindow::for_grid(&g), 4.0).unwrap();
        assert_eq!(c.block, 1);
        for d in 0..3 {
            assert!(
                core_distance([c.location[d]; 3], [3.0 * h; 3], Some(g.period() / 4.0)) < 1e-12
            );
        }
    }
}
