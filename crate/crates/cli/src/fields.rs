//! Turning recipes into fields, forces and planted profile sets.

use csns_core::experiments::truncate_for_dilation;
use csns_core::profiles::families::{gaussian_vortex, unit_shell_field};
use csns_core::profiles::{ProfileSet, ScaleCore};
use csns_core::spectral::random::random_solenoidal;
use csns_core::spectral::snapshot::read_snapshot;
use csns_core::spectral::{ForceSpec, PeriodicGrid, SpectralField};
use csns_core::Result;

use crate::config::{FieldSpec, PlantedFamily};

/// Build `spec` on `grid`. `steady` supplies the field for [`FieldSpec::Steady`].
pub fn build_field(
    spec: &FieldSpec,
    grid: &PeriodicGrid,
    seed: u64,
    steady: Option<&SpectralField>,
) -> Result<SpectralField> {
    match spec {
        FieldSpec::Zero => Ok(SpectralField::zeros(grid, 3)),
        FieldSpec::Random {
            kmax,
            slope,
            rms,
            seed_offset,
        } => Ok(random_solenoidal(
            grid,
            seed.wrapping_add(*seed_offset),
            *kmax,
            *slope,
            *rms,
        )),
        FieldSpec::Shell {
            weights,
            diagonal,
            amplitude,
        } => Ok(unit_shell_field(grid, *weights, *diagonal)?.scale(*amplitude)),
        FieldSpec::Vortex {
            center,
            sigma,
            amplitude,
        } => {
            let v = gaussian_vortex(grid, *center, *sigma)?;
            Ok(truncate_for_dilation(&v, 0).scale(*amplitude))
        }
        FieldSpec::Steady => Ok(steady
            .cloned()
            .unwrap_or_else(|| SpectralField::zeros(grid, 3))),
        FieldSpec::Snapshot { path } => {
            let u = read_snapshot(path)?;
            u.check_same_grid(&SpectralField::zeros(grid, u.ncomp()))?;
            Ok(u)
        }
    }
}

/// The force whose potential `Delta^{-1} f` is given by `spec`.
pub fn build_force(spec: &FieldSpec, grid: &PeriodicGrid, seed: u64) -> Result<ForceSpec> {
    match spec {
        FieldSpec::Zero => Ok(ForceSpec::zero(grid)),
        other => ForceSpec::from_potential(&build_field(other, grid, seed, None)?),
    }
}

pub fn build_family(family: &PlantedFamily, grid: &PeriodicGrid, seed: u64) -> Result<ProfileSet> {
    let mut profiles = Vec::with_capacity(family.profiles.len());
    let mut seqs = Vec::with_capacity(family.profiles.len());
    for (j, p) in family.profiles.iter().enumerate() {
        profiles.push(build_field(
            &p.field,
            grid,
            seed.wrapping_add(j as u64),
            None,
        )?);
        seqs.push(
            (0..family.count)
                .map(|n| {
                    let t = n as f64;
                    ScaleCore::new(
                        p.exponent + n as i32 * p.exponent_step,
                        [0, 1, 2].map(|d| p.core_start[d] + t * p.core_step[d]),
                    )
                })
                .collect(),
        );
    }
    let remainder = build_field(
        &family.remainder,
        grid,
        seed.wrapping_add(family.profiles.len() as u64),
        None,
    )?;
    ProfileSet::new(profiles, seqs, vec![remainder; family.count])
}
