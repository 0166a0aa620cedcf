use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lambda::apply_lambda;
use super::scale_core::{orthogonality_value, ScaleCore};
use crate::besov::lp_norm;
use crate::error::{CsnsError, Result};
use crate::spectral::snapshot::{read_snapshot, write_snapshot};
use crate::spectral::SpectralField;

/// Profiles `phi_j`, their scale-core sequences over `n`, and remainders `psi_n`.
#[derive(Clone, Debug)]
pub struct ProfileSet {
    pub profiles: Vec<SpectralField>,
    pub scale_core_seqs: Vec<Vec<ScaleCore>>,
    pub remainder_seq: Vec<SpectralField>,
}

impl ProfileSet {
    pub fn new(
        profiles: Vec<SpectralField>,
        scale_core_seqs: Vec<Vec<ScaleCore>>,
        remainder_seq: Vec<SpectralField>,
    ) -> Result<Self> {
        let set = Self {
            profiles,
            scale_core_seqs,
            remainder_seq,
        };
        set.validate()?;
        Ok(set)
    }

    /// Number of sequence indices `n`.
    pub fn len(&self) -> usize {
        self.remainder_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.remainder_seq.is_empty()
    }

    pub fn profile_count(&self) -> usize {
        self.profiles.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.profiles.len() != self.scale_core_seqs.len() {
            return Err(CsnsError::Precondition(
                "one scale-core sequence per profile is required".into(),
            ));
        }
        if self.remainder_seq.is_empty() {
            return Err(CsnsError::Precondition(
                "profile set needs at least one sequence index".into(),
            ));
        }
        let n = self.remainder_seq.len();
        if self.scale_core_seqs.iter().any(|s| s.len() != n) {
            return Err(CsnsError::Precondition(
                "scale-core sequences must match the remainder length".into(),
            ));
        }
        if let Some(first) = self.scale_core_seqs.first() {
            if first.iter().any(|sc| *sc != ScaleCore::IDENTITY) {
                return Err(CsnsError::Precondition(
                    "the first scale-core sequence must be identically (1, 0)".into(),
                ));
            }
        }
        let reference = &self.remainder_seq[0];
        for f in self.profiles.iter().chain(&self.remainder_seq) {
            reference.check_same_grid(f)?;
            if f.ncomp() != reference.ncomp() {
                return Err(CsnsError::Precondition(
                    "profiles and remainders differ in component count".into(),
                ));
            }
        }
        Ok(())
    }

    /// Smallest pairwise orthogonality value at index `n` (infinite for fewer than two profiles).
    pub fn min_orthogonality(&self, n: usize) -> f64 {
        let period = Some(self.remainder_seq[0].grid().period());
        let mut worst = f64::INFINITY;
        for a in 0..self.scale_core_seqs.len() {
            for b in a + 1..self.scale_core_seqs.len() {
                let (sa, sb) = (&self.scale_core_seqs[a], &self.scale_core_seqs[b]);
                worst = worst
                    .min(orthogonality_value(sa, sb, n, period))
                    .min(orthogonality_value(sb, sa, n, period));
            }
        }
        worst
    }
}

/// `sum_j Lambda_{j,n} phi_j + psi_n`.
pub fn synthesize(set: &ProfileSet, n: usize) -> Result<SpectralField> {
    if n >= set.len() {
        return Err(CsnsError::Precondition(format!(
            "index {n} beyond sequence length {}",
            set.len()
        )));
    }
    let mut out = set.remainder_seq[n].clone();
    let mut solenoidal = out.is_divergence_free();
    for (phi, seq) in set.profiles.iter().zip(&set.scale_core_seqs) {
        let img = apply_lambda(phi, seq[n])?;
        solenoidal &= img.is_divergence_free();
        out.add_scaled(1.0, &img)?;
    }
    if solenoidal || out.divergence_residual() < 1e-12 {
        out = mark_solenoidal(out);
    }
    Ok(out)
}

fn mark_solenoidal(mut u: SpectralField) -> SpectralField {
    if u.ncomp() == 3 {
        u.set_divergence_free(true);
    }
    u
}

/// `||phi_n||^3 - ||Lambda_{1,n} phi_1||^3 - ||phi_n - Lambda_{1,n} phi_1||^3` in `L^3`.
pub fn pythagorean_defect(phi_n: &SpectralField, set: &ProfileSet, n: usize) -> Result<f64> {
    let first = set
        .profiles
        .first()
        .ok_or_else(|| CsnsError::Precondition("defect needs at least one profile".into()))?;
    phi_n.check_same_grid(first)?;
    let img = apply_lambda(first, set.scale_core_seqs[0][n])?;
    let rest = phi_n.sub(&img)?;
    Ok(lp_norm(phi_n, 3.0)?.powi(3) - lp_norm(&img, 3.0)?.powi(3) - lp_norm(&rest, 3.0)?.powi(3))
}

#[derive(Serialize, Deserialize)]
struct ProfileManifest {
    scale_core_seqs: Vec<Vec<ScaleCore>>,
    profile_files: Vec<String>,
    remainder_files: Vec<String>,
    planted_truth: Option<serde_json::Value>,
}

pub fn write_profile_set(
    dir: &Path,
    set: &ProfileSet,
    planted_truth: Option<serde_json::Value>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut profile_files = Vec::new();
    for (j, p) in set.profiles.iter().enumerate() {
        let name = format!("profile_{j:03}.bin");
        write_snapshot(&dir.join(&name), p)?;
        profile_files.push(name);
    }
    let mut remainder_files = Vec::new();
    for (n, r) in set.remainder_seq.iter().enumerate() {
        let name = format!("remainder_{n:03}.bin");
        write_snapshot(&dir.join(&name), r)?;
        remainder_files.push(name);
    }
    let manifest = ProfileManifest {
        scale_core_seqs: set.scale_core_seqs.clone(),
        profile_files,
        remainder_files,
        planted_truth,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

pub fn read_profile_set(dir: &Path) -> Result<ProfileSet> {
    let manifest: ProfileManifest =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let load = |names: &[String]| {
        names
            .iter()
            .map(|f| read_snapshot(&dir.join(f)))
            .collect::<Result<Vec<_>>>()
    };
    ProfileSet::new(
        load(&manifest.profile_files)?,
        manifest.scale_core_seqs,
        load(&manifest.remainder_files)?,
    )
}
