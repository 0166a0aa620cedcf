use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::PeriodicGrid;
use crate::error::{CsnsError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier coefficients of a real periodic field with `ncomp` components.
///
/// The mean mode is always zero. Three-component fields are velocities; one
/// component is used for scalar products and nine for tensors `a_i b_j`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: PeriodicGrid,
    comps: Vec<Vec<Complex64>>,
    divergence_free: bool,
}

/// Real samples of a field on the grid points, one array per component.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: PeriodicGrid,
    comps: Vec<Vec<f64>>,
}

impl SpectralField {
    pub fn zeros(grid: &PeriodicGrid, ncomp: usize) -> Self {
        Self {
            grid: grid.clone(),
            comps: vec![vec![ZERO; grid.len()]; ncomp],
            divergence_free: ncomp == 3,
        }
    }

    /// Wrap raw coefficients. The mean coefficient must be exactly zero.
    pub fn from_coefficients(grid: &PeriodicGrid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(CsnsError::Precondition(
                "field needs at least one component".into(),
            ));
        }
        if let Some(c) = comps.iter().position(|c| c.len() != grid.len()) {
            return Err(CsnsError::Precondition(format!(
                "component {c} has {} coefficients, grid needs {}",
                comps[c].len(),
                grid.len()
            )));
        }
        if comps.iter().any(|c| c[0] != ZERO) {
            return Err(CsnsError::Precondition("mean mode must be zero".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
            divergence_free: false,
        })
    }

    pub(crate) fn from_parts(
        grid: &PeriodicGrid,
        comps: Vec<Vec<Complex64>>,
        divergence_free: bool,
    ) -> Self {
        Self {
            grid: grid.clone(),
            comps,
            divergence_free,
        }
    }

    /// Transform real samples; the mean and the Nyquist planes are dropped.
    pub fn from_physical(physical: &PhysicalField) -> Self {
        let grid = physical.grid();
        let comps = physical
            .comps
            .iter()
            .map(|c| {
                let mut data: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                fft::forward(grid, &mut data);
                strip_unrepresentable(grid, &mut data);
                data
            })
            .collect();
        Self {
            grid: grid.clone(),
            comps,
            divergence_free: false,
        }
    }

    /// Sample `f(x, out)` at every grid point and transform.
    pub fn from_fn(grid: &PeriodicGrid, ncomp: usize, f: impl Fn([f64; 3], &mut [f64])) -> Self {
        Self::from_physical(&PhysicalField::from_fn(grid, ncomp, f))
    }

    /// Real field `a e^{i k.x} + conj(a) e^{-i k.x}`.
    pub fn single_mode(grid: &PeriodicGrid, k: [i64; 3], amplitude: &[Complex64]) -> Result<Self> {
        let lin = grid
            .mode_index(k)
            .filter(|&l| l != 0 && !grid.is_nyquist(l))
            .ok_or_else(|| CsnsError::Precondition(format!("mode {k:?} is not representable")))?;
        let conj = grid.conjugate_index(lin);
        let mut out = Self::zeros(grid, amplitude.len());
        for (c, a) in amplitude.iter().enumerate() {
            out.comps[c][lin] += *a;
            out.comps[c][conj] += a.conj();
        }
        out.divergence_free = false;
        Ok(out)
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn coeffs(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    /// The certificate flag set by the Leray projector.
    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub(crate) fn set_divergence_free(&mut self, flag: bool) {
        self.divergence_free = flag;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|z| *z == ZERO))
    }

    pub fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(CsnsError::GridMismatch);
        }
        Ok(())
    }

    fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        self.check_same_grid(other)?;
        if self.ncomp() != other.ncomp() {
            return Err(CsnsError::Precondition(format!(
                "component count mismatch: {} vs {}",
                self.ncomp(),
                other.ncomp()
            )));
        }
        Ok(())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SpectralField, beta: f64) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * alpha + y * beta).collect())
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            comps,
            divergence_free: self.divergence_free && other.divergence_free,
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            comps,
            divergence_free: self.divergence_free && other.divergence_free,
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_compatible(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            comps,
            divergence_free: self.divergence_free && other.divergence_free,
        })
    }

    pub fn scale(&self, alpha: f64) -> SpectralField {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|z| z * alpha).collect())
            .collect();
        Self {
            grid: self.grid.clone(),
            comps,
            divergence_free: self.divergence_free,
        }
    }

    /// In-place `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &SpectralField) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * alpha;
            }
        }
        self.divergence_free &= other.divergence_free;
        Ok(())
    }

    /// Multiply every component by a real per-mode symbol.
    pub fn apply_symbol(&self, symbol: impl Fn(usize) -> f64) -> SpectralField {
        let mut out = self.clone();
        let table: Vec<f64> = (0..self.grid.len()).map(symbol).collect();
        for c in out.comps.iter_mut() {
            for (z, m) in c.iter_mut().zip(&table) {
                *z *= *m;
            }
        }
        out
    }

    pub(crate) fn apply_symbol_table(&self, table: &[f64]) -> SpectralField {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            for (z, m) in c.iter_mut().zip(table) {
                *z *= *m;
            }
        }
        out
    }

    /// Inverse transform to real samples.
    pub fn to_physical(&self) -> PhysicalField {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut data = c.clone();
                fft::inverse(&self.grid, &mut data);
                data.into_iter().map(|z| z.re).collect()
            })
            .collect();
        PhysicalField {
            grid: self.grid.clone(),
            comps,
        }
    }

    /// Physical-space L^2 norm through Parseval.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum();
        (s * self.grid.period().powi(3)).sqrt()
    }

    /// Largest coefficient modulus over all components.
    pub fn max_coefficient(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |k . u_hat(k)| / max_k |k| |u_hat(k)|`; zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        assert_eq!(self.ncomp(), 3, "divergence needs a vector field");
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for lin in 0..self.grid.len() {
            let k = self.grid.mode(lin);
            let dot = self.comps[0][lin] * k[0] as f64
                + self.comps[1][lin] * k[1] as f64
                + self.comps[2][lin] * k[2] as f64;
            let mag = (0..3)
                .map(|c| self.comps[c][lin].norm_sqr())
                .sum::<f64>()
                .sqrt();
            num = num.max(dot.norm());
            den = den.max((self.grid.k_sq(lin) as f64).sqrt() * mag);
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Largest violation of `u_hat(-k) = conj(u_hat(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for lin in 0..self.grid.len() {
                let partner = c[self.grid.conjugate_index(lin)];
                worst = worst.max((c[lin] - partner.conj()).norm());
            }
        }
        worst
    }

    /// Largest `|k_i|` over modes carrying a nonzero coefficient.
    pub fn max_frequency(&self) -> i64 {
        let mut m = 0;
        for lin in 0..self.grid.len() {
            if self.comps.iter().any(|c| c[lin] != ZERO) {
                m = m.max(
                    self.grid
                        .mode(lin)
                        .iter()
                        .map(|k| k.abs())
                        .max()
                        .unwrap_or(0),
                );
            }
        }
        m
    }

    /// Linear indices of modes with any nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.grid.len())
            .filter(|&lin| self.comps.iter().any(|c| c[lin] != ZERO))
            .collect()
    }

    /// Select a subset of components.
    pub fn select_components(&self, which: &[usize]) -> SpectralField {
        let comps = which.iter().map(|&c| self.comps[c].clone()).collect();
        Self {
            grid: self.grid.clone(),
            comps,
            divergence_free: false,
        }
    }
}

impl PhysicalField {
    pub fn new(grid: &PeriodicGrid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.is_empty() || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(CsnsError::Precondition(
                "physical component length mismatch".into(),
            ));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    pub fn from_fn(grid: &PeriodicGrid, ncomp: usize, f: impl Fn([f64; 3], &mut [f64])) -> Self {
        let n = grid.n();
        let mut comps = vec![vec![0.0; grid.len()]; ncomp];
        let mut buf = vec![0.0; ncomp];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lin = grid.linear_index([i, j, k]);
                    f(
                        [grid.coordinate(i), grid.coordinate(j), grid.coordinate(k)],
                        &mut buf,
                    );
                    for c in 0..ncomp {
                        comps[c][lin] = buf[c];
                    }
                }
            }
        }
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    /// Euclidean magnitude at every grid point.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    /// Rectangle-rule `L^p` norm of the pointwise magnitude; `p = inf` is the max.
    pub fn lp_quadrature(&self, p: f64) -> f64 {
        let mag = self.magnitude();
        if p.is_infinite() {
            return mag.into_iter().fold(0.0, f64::max);
        }
        let s: f64 = mag.iter().map(|m| m.powf(p)).sum();
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }
}

/// Zero the mean and the Nyquist planes.
pub(crate) fn strip_unrepresentable(grid: &PeriodicGrid, data: &mut [Complex64]) {
    data[0] = ZERO;
    let n = grid.n();
    let h = n / 2;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == h || b == h || c == h {
                    data[grid.linear_index([a, b, c])] = ZERO;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn physical_round_trip_on_sine() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let u = SpectralField::from_fn(&g, 3, |x, out| {
            out[0] = x[1].sin();
            out[1] = (2.0 * x[2]).cos();
            out[2] = 0.0;
        });
        let lin = g.mode_index([0, 1, 0]).unwrap();
        assert!((u.coeffs(0)[lin] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        let back = SpectralField::from_physical(&u.to_physical());
        assert!(u.max_abs_diff(&back) < 1e-15);
        assert!(u.hermitian_defect() < 1e-15);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = PeriodicGrid::new(16, 3.0).unwrap();
        let u = SpectralField::from_fn(&g, 3, |x, out| {
            out[0] = (2.0 * PI * x[0] / 3.0).sin();
            out[1] = 0.3 * (4.0 * PI * x[2] / 3.0).cos();
            out[2] = 0.0;
        });
        let quad = u.to_physical().lp_quadrature(2.0);
        assert!((u.l2_norm() - quad).abs() < 1e-12 * quad);
    }

    #[test]
    fn mean_mode_is_rejected_or_dropped() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let mut c = vec![vec![ZERO; g.len()]; 3];
        c[1][0] = Complex64::new(1.0, 0.0);
        assert!(SpectralField::from_coefficients(&g, c).is_err());
        let u = SpectralField::from_fn(&g, 1, |_, out| out[0] = 2.5);
        assert!(u.is_zero());
    }
}
