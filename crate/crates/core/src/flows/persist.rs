//! On-disk trajectories: one snapshot file per sample plus `manifest.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::solution::MildSolution;
use crate::besov::{besov_norm, lp_norm, BesovSpec, Trajectory};
use crate::error::{CsnsError, Result};
use crate::spectral::snapshot::{read_snapshot, write_snapshot};

/// Integrability of the critical Besov column in saved diagnostics.
pub const DIAGNOSTIC_P: f64 = 4.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub times: Vec<f64>,
    pub files: Vec<String>,
    pub config: serde_json::Value,
    pub norms: SnapshotNorms,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotNorms {
    pub l3: Vec<f64>,
    pub besov_p: f64,
    /// `||u(t)||_{B^{s_p}_{p,p}}` with `p = besov_p`.
    pub besov_critical: Vec<f64>,
}

fn snapshot_norms(tr: &Trajectory) -> Result<SnapshotNorms> {
    let spec = BesovSpec::critical(DIAGNOSTIC_P, 0.0, tr.window())?;
    let mut l3 = Vec::with_capacity(tr.len());
    let mut besov = Vec::with_capacity(tr.len());
    for u in tr.fields() {
        l3.push(lp_norm(u, 3.0)?);
        besov.push(besov_norm(u, &spec)?);
    }
    Ok(SnapshotNorms {
        l3,
        besov_p: DIAGNOSTIC_P,
        besov_critical: besov,
    })
}

pub fn write_trajectory(
    dir: &Path,
    tr: &Trajectory,
    config: serde_json::Value,
) -> Result<TrajectoryManifest> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(tr.len());
    for (i, u) in tr.fields().iter().enumerate() {
        let name = format!("snap_{i:05}.bin");
        write_snapshot(&dir.join(&name), u)?;
        files.push(name);
    }
    let manifest = TrajectoryManifest {
        times: tr.times().to_vec(),
        files,
        config,
        norms: snapshot_norms(tr)?,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

/// Trajectory plus `diagnostics.csv` with columns `t,l3,linf,besov_sp,residual,picard_iterations,cfl`;
/// the Besov column is filled at saved samples only.
pub fn write_solution(
    dir: &Path,
    sol: &MildSolution,
    config: serde_json::Value,
) -> Result<TrajectoryManifest> {
    let manifest = write_trajectory(dir, &sol.trajectory, config)?;
    let mut csv = String::from("t,l3,linf,besov_sp,residual,picard_iterations,cfl\n");
    for d in &sol.diagnostics {
        let besov = match sol.trajectory.index_of_time(d.t) {
            Some(i) => format!("{:?}", manifest.norms.besov_critical[i]),
            None => String::new(),
        };
        csv.push_str(&format!(
            "{:?},{:?},{:?},{},{:?},{},{:?}\n",
            d.t, d.l3, d.linf, besov, d.residual, d.picard_iterations, d.cfl
        ));
    }
    fs::write(dir.join("diagnostics.csv"), csv)?;
    Ok(manifest)
}

pub fn read_trajectory(dir: &Path) -> Result<Trajectory> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: TrajectoryManifest = serde_json::from_str(&text)?;
    if manifest.files.len() != manifest.times.len() {
        return Err(CsnsError::Format(
            "manifest lists different numbers of times and files".into(),
        ));
    }
    let fields = manifest
        .files
        .iter()
        .map(|f| read_snapshot(&dir.join(f)))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(manifest.times, fields)
}
