use super::field::SpectralField;
use super::ops::{inverse_laplacian, laplacian, leray_project};
use crate::besov::lp_norm;
use crate::error::{CsnsError, Result};

/// A time-independent force held through its potential `g = Delta^{-1} P f`.
///
/// Only the solenoidal part of a force moves an incompressible flow, so the
/// potential is stored after Leray projection.
#[derive(Clone, Debug)]
pub struct ForceSpec {
    potential: SpectralField,
    l3_size: f64,
}

impl ForceSpec {
    pub fn from_potential(g: &SpectralField) -> Result<Self> {
        let potential = leray_project(g)?;
        let l3_size = lp_norm(&potential, 3.0)?;
        Ok(Self { potential, l3_size })
    }

    pub fn from_force(f: &SpectralField) -> Result<Self> {
        Self::from_potential(&inverse_laplacian(f)?)
    }

    pub fn zero(grid: &crate::spectral::PeriodicGrid) -> Self {
        Self {
            potential: SpectralField::zeros(grid, 3),
            l3_size: 0.0,
        }
    }

    pub fn potential(&self) -> &SpectralField {
        &self.potential
    }

    /// `f = Delta g`, divergence-free.
    pub fn force(&self) -> SpectralField {
        let mut f = laplacian(&self.potential);
        f.set_divergence_free(true);
        f
    }

    /// Cached `||Delta^{-1} f||_{L^3}`.
    pub fn l3_size(&self) -> f64 {
        self.l3_size
    }

    pub fn is_zero(&self) -> bool {
        self.potential.is_zero()
    }

    /// The same force multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            potential: self.potential.scale(alpha),
            l3_size: self.l3_size * alpha.abs(),
        }
    }

    pub fn check_consistent(&self) -> Result<()> {
        let again = lp_norm(&self.potential, 3.0)?;
        if (again - self.l3_size).abs() > 1e-12 * self.l3_size.max(f64::MIN_POSITIVE) {
            return Err(CsnsError::Precondition("cached L3 size is stale".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::random_solenoidal;
    use crate::spectral::PeriodicGrid;

    #[test]
    fn force_and_potential_are_inverse_pair() {
        let g = PeriodicGrid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let pot = random_solenoidal(&g, 4, 3, -1.0, 0.2);
        let spec = ForceSpec::from_potential(&pot).unwrap();
        let again = ForceSpec::from_force(&spec.force()).unwrap();
        assert!(again.potential().max_abs_diff(&pot) <= 1e-14 * pot.max_coefficient());
        assert!((again.l3_size() - spec.l3_size()).abs() <= 1e-12 * spec.l3_size());
        spec.check_consistent().unwrap();
    }
}
