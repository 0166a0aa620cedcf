//! Resolution-independent test fields for inequality checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::besov::Trajectory;
use crate::error::{CsnsError, Result};
use crate::spectral::random::normalize_rms;
use crate::spectral::{heat_semigroup, leray_project, Complex64, PeriodicGrid, SpectralField};

/// Smallest admissible corpus.
pub const MIN_CORPUS: usize = 30;

/// Recipe for a corpus of field pairs. Coefficients are drawn per wavevector,
/// so the same recipe yields the same continuum fields at every resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSpec {
    /// One random pair per seed.
    pub seeds: Vec<u64>,
    /// Number of two-block pairs (low shell plus high shell).
    pub two_block: usize,
    /// Random pairs use modes with `max_i |k_i| <= kmax`.
    pub kmax: i64,
    /// Coefficient size `~ |k|^slope`.
    pub slope: f64,
    /// Time samples of each heat-flow trajectory.
    pub samples: usize,
    pub horizon: f64,
    pub period: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self::standard(1, MIN_CORPUS)
    }
}

impl CorpusSpec {
    /// `size - 6` random pairs from consecutive seeds plus six two-block pairs.
    pub fn standard(base_seed: u64, size: usize) -> Self {
        let two_block = 6.min(size);
        Self {
            seeds: (base_seed..base_seed + (size - two_block) as u64).collect(),
            two_block,
            kmax: 2,
            slope: -1.0,
            samples: 5,
            horizon: 0.25,
            period: 2.0 * std::f64::consts::PI,
        }
    }

    pub fn len(&self) -> usize {
        self.seeds.len() + self.two_block
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.len() < MIN_CORPUS {
            return Err(CsnsError::Precondition(format!(
                "corpus has {} items, need at least {MIN_CORPUS}",
                self.len()
            )));
        }
        if self.kmax < 1 || self.samples < 2 || !(self.horizon > 0.0) || !(self.period > 0.0) {
            return Err(CsnsError::Precondition(
                "corpus needs kmax >= 1, samples >= 2 and positive horizon, period".into(),
            ));
        }
        Ok(())
    }

    /// Smallest grid on which products of two corpus fields survive both the
    /// alias-free product and the two-thirds dealiasing rule.
    pub fn min_points(&self) -> usize {
        6 * self.kmax.max(2) as usize
    }

    pub fn build(&self, grid: &PeriodicGrid) -> Result<Vec<CorpusPair>> {
        self.validate()?;
        if grid.n() < self.min_points() {
            return Err(CsnsError::Precondition(format!(
                "corpus products need n >= {}, got {}",
                self.min_points(),
                grid.n()
            )));
        }
        let mut out = Vec::with_capacity(self.len());
        for &seed in &self.seeds {
            let first = seeded_field(grid, seed, self.kmax, self.slope)?;
            let second = seeded_field(grid, seed ^ 0x9e37_79b9_7f4a_7c15, self.kmax, self.slope)?;
            out.push(CorpusPair { first, second });
        }
        for b in 0..self.two_block {
            out.push(two_block_pair(grid, b)?);
        }
        Ok(out)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|i| self.horizon * i as f64 / (self.samples - 1) as f64)
            .collect()
    }

    pub fn heat_trajectory(&self, u: &SpectralField) -> Result<Trajectory> {
        let times = self.times();
        let fields = times
            .iter()
            .map(|&t| heat_semigroup(u, t))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(times, fields)
    }
}

#[derive(Clone, Debug)]
pub struct CorpusPair {
    pub first: SpectralField,
    pub second: SpectralField,
}

fn seeded_field(grid: &PeriodicGrid, seed: u64, kmax: i64, slope: f64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = Complex64::new(0.0, 0.0);
    let mut comps = vec![vec![zero; grid.len()]; 3];
    for a in -kmax..=kmax {
        for b in -kmax..=kmax {
            for c in -kmax..=kmax {
                let k = [a, b, c];
                // One representative per conjugate pair.
                let Some(lead) = k.iter().find(|&&v| v != 0) else {
                    continue;
                };
                if *lead < 0 {
                    continue;
                }
                let weight = ((a * a + b * b + c * c) as f64).powf(slope / 2.0);
                let lin = grid
                    .mode_index(k)
                    .ok_or_else(|| CsnsError::Precondition(format!("mode {k:?} not on grid")))?;
                let conj = grid.conjugate_index(lin);
                for comp in comps.iter_mut() {
                    let z =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * weight;
                    comp[lin] = z;
                    comp[conj] = z.conj();
                }
            }
        }
    }
    let raw = SpectralField::from_coefficients(grid, comps)?;
    Ok(normalize_rms(&leray_project(&raw)?, 1.0))
}

/// Low shell `|k| = 1` plus a high shell `|k| = 2` with amplitude ratio `2^{b - 2}`;
/// the partner has the roles swapped.
fn two_block_pair(grid: &PeriodicGrid, b: usize) -> Result<CorpusPair> {
    let z = Complex64::new(0.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let d = b % 3;
    let e = (d + 1) % 3;
    let f = (d + 2) % 3;
    let unit = |i: usize| {
        let mut a = [z; 3];
        a[i] = half;
        a
    };
    let axis = |i: usize, m: i64| {
        let mut k = [0i64; 3];
        k[i] = m;
        k
    };
    let amp = 2f64.powi(b as i32 - 2);
    let mut first = SpectralField::single_mode(grid, axis(d, 1), &unit(e))?;
    first.add_scaled(
        amp,
        &SpectralField::single_mode(grid, axis(e, 2), &unit(f))?,
    )?;
    let mut second = SpectralField::single_mode(grid, axis(f, 2), &unit(d))?.scale(amp);
    second.add_scaled(
        1.0,
        &SpectralField::single_mode(grid, axis(e, 1), &unit(f))?,
    )?;
    Ok(CorpusPair {
        first: leray_project(&first)?,
        second: leray_project(&second)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fields_agree_across_resolutions() {
        let spec = CorpusSpec::standard(5, 30);
        let a = spec
            .build(&PeriodicGrid::new(16, 2.0 * PI).unwrap())
            .unwrap();
        let b = spec
            .build(&PeriodicGrid::new(32, 2.0 * PI).unwrap())
            .unwrap();
        assert_eq!(a.len(), 30);
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in [(&x.first, &y.first), (&x.second, &y.second)] {
                assert!(u.divergence_residual() < 1e-14);
                for lin in u.support() {
                    let k = u.grid().mode(lin);
                    let other = v.grid().mode_index(k).unwrap();
                    for c in 0..3 {
                        assert_eq!(u.coeffs(c)[lin], v.coeffs(c)[other]);
                    }
                }
                assert_eq!(u.support().len(), v.support().len());
            }
        }
    }

    #[test]
    fn small_corpus_and_coarse_grid_are_rejected() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        assert!(CorpusSpec::standard(1, 10).build(&g).is_err());
        let mut spec = CorpusSpec::standard(1, 30);
        spec.kmax = 4;
        assert!(spec.build(&g).is_err());
    }
}
