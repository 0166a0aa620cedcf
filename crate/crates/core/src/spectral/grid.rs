use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{CsnsError, Result};

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

/// Uniform periodic grid on `[0, L)^3` with its wavenumber tables and FFT plans.
///
/// Cloning is cheap; all tables are shared.
#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridTables>,
}

struct GridTables {
    n: usize,
    period: f64,
    dealias_fraction: f64,
    /// Integer frequency per FFT index along one axis.
    freq: Vec<i64>,
    /// `|k|^2` (integer) per linear mode index.
    k_sq: Vec<u32>,
    /// `|xi|^2` per linear mode index.
    xi_sq: Vec<f64>,
    dealias: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Admissible points-per-axis: `2^a` or `3 * 2^a`, at least 16.
pub fn admissible_points(n: usize) -> bool {
    if n < 16 {
        return false;
    }
    let odd = n >> n.trailing_zeros();
    odd == 1 || odd == 3
}

impl PeriodicGrid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        Self::with_dealias(n, period, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn with_dealias(n: usize, period: f64, dealias_fraction: f64) -> Result<Self> {
        if !admissible_points(n) {
            return Err(CsnsError::InvalidGrid(format!(
                "points per axis must be 2^a or 3*2^a and at least 16, got {n}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(CsnsError::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(CsnsError::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        let half = (n / 2) as i64;
        let freq: Vec<i64> = (0..n as i64)
            .map(|i| if i <= half { i } else { i - n as i64 })
            .collect();
        let unit = 2.0 * PI / period;
        let cutoff = dealias_fraction * half as f64;
        let total = n * n * n;
        let mut k_sq = Vec::with_capacity(total);
        let mut xi_sq = Vec::with_capacity(total);
        let mut dealias = Vec::with_capacity(total);
        for &a in &freq {
            for &b in &freq {
                for &c in &freq {
                    let ks = (a * a + b * b + c * c) as u32;
                    k_sq.push(ks);
                    xi_sq.push(unit * unit * ks as f64);
                    let keep = [a, b, c]
                        .iter()
                        .all(|&k| (k.abs() as f64) <= cutoff && k != half);
                    dealias.push(keep);
                }
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridTables {
                n,
                period,
                dealias_fraction,
                freq,
                k_sq,
                xi_sq,
                dealias,
                forward,
                inverse,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.inner.dealias_fraction
    }

    /// Number of grid points (and of Fourier modes).
    pub fn len(&self) -> usize {
        self.inner.k_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.period / self.inner.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// `2 pi / L`, the physical wavenumber of `|k| = 1`.
    pub fn unit_wavenumber(&self) -> f64 {
        2.0 * PI / self.inner.period
    }

    /// Integer frequency of FFT index `i` along one axis.
    pub fn freq(&self, i: usize) -> i64 {
        self.inner.freq[i]
    }

    /// FFT index of integer frequency `k`, if representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let n = self.inner.n as i64;
        let half = n / 2;
        if k > half || k <= -half {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    pub fn linear_index(&self, i: [usize; 3]) -> usize {
        let n = self.inner.n;
        (i[0] * n + i[1]) * n + i[2]
    }

    pub fn split_index(&self, lin: usize) -> [usize; 3] {
        let n = self.inner.n;
        [lin / (n * n), (lin / n) % n, lin % n]
    }

    /// Integer wavevector of linear mode index `lin`.
    pub fn mode(&self, lin: usize) -> [i64; 3] {
        let [a, b, c] = self.split_index(lin);
        [self.inner.freq[a], self.inner.freq[b], self.inner.freq[c]]
    }

    /// Linear index of integer wavevector `k`, if representable.
    pub fn mode_index(&self, k: [i64; 3]) -> Option<usize> {
        Some(self.linear_index([
            self.index_of(k[0])?,
            self.index_of(k[1])?,
            self.index_of(k[2])?,
        ]))
    }

    /// Linear index of `-k` for the mode at `lin`.
    pub fn conjugate_index(&self, lin: usize) -> usize {
        let n = self.inner.n;
        let [a, b, c] = self.split_index(lin);
        self.linear_index([(n - a) % n, (n - b) % n, (n - c) % n])
    }

    pub fn k_sq(&self, lin: usize) -> u32 {
        self.inner.k_sq[lin]
    }

    pub fn k_sq_table(&self) -> &[u32] {
        &self.inner.k_sq
    }

    /// `|xi|^2` per mode.
    pub fn xi_sq_table(&self) -> &[f64] {
        &self.inner.xi_sq
    }

    /// `|xi|` computed as `unit * sqrt(|k|^2)`, which commutes exactly with dyadic index dilation.
    pub fn xi_abs(&self, lin: usize) -> f64 {
        self.unit_wavenumber() * (self.inner.k_sq[lin] as f64).sqrt()
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.inner.dealias
    }

    /// Whether the mode lies on a Nyquist plane (`k_i = n/2` for some axis).
    pub fn is_nyquist(&self, lin: usize) -> bool {
        let half = (self.inner.n / 2) as i64;
        self.mode(lin).contains(&half)
    }

    /// Largest physical wavenumber magnitude representable on the grid.
    pub fn xi_max(&self) -> f64 {
        self.unit_wavenumber() * (self.inner.n / 2) as f64 * 3f64.sqrt()
    }

    /// Largest integer frequency kept by the dealias mask along one axis.
    pub fn dealias_cutoff(&self) -> i64 {
        let half = (self.inner.n / 2) as i64;
        let c = (self.inner.dealias_fraction * half as f64).floor() as i64;
        c.min(half - 1)
    }

    /// Physical coordinate of grid index `i` along an axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.inverse
    }

    /// Same points, period and dealias fraction.
    pub fn same_as(&self, other: &PeriodicGrid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n
                && self.inner.period.to_bits() == other.inner.period.to_bits()
                && self.inner.dealias_fraction.to_bits() == other.inner.dealias_fraction.to_bits())
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n", &self.inner.n)
            .field("period", &self.inner.period)
            .field("dealias_fraction", &self.inner.dealias_fraction)
            .finish()
    }
}

/// Build a grid with the default 2/3 dealias fraction.
pub fn make_grid(n: usize, period: f64) -> Result<PeriodicGrid> {
    PeriodicGrid::new(n, period)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_period_gives_integer_wavenumbers() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        assert_eq!(g.freq(0), 0);
        assert_eq!(g.freq(16), 16);
        assert_eq!(g.freq(17), -15);
        assert!((g.unit_wavenumber() - 1.0).abs() < 1e-15);
        let lin = g.mode_index([3, -2, 1]).unwrap();
        assert_eq!(g.mode(lin), [3, -2, 1]);
        assert!((g.xi_sq_table()[lin] - 14.0).abs() < 1e-12);
    }

    #[test]
    fn unit_box_scales_wavenumbers_by_two_pi() {
        let g = make_grid(16, 1.0).unwrap();
        assert!((g.unit_wavenumber() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes_and_periods() {
        assert!(make_grid(33, 2.0 * PI).is_err());
        assert!(make_grid(8, 2.0 * PI).is_err());
        assert!(make_grid(20, 2.0 * PI).is_err());
        assert!(make_grid(32, 0.0).is_err());
        assert!(make_grid(32, -1.0).is_err());
        assert!(make_grid(48, 1.0).is_ok());
        assert!(make_grid(96, 1.0).is_ok());
    }

    #[test]
    fn dealias_mask_applies_two_thirds_rule() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        assert_eq!(g.dealias_cutoff(), 10);
        let keep = g.mode_index([10, -10, 0]).unwrap();
        let drop = g.mode_index([11, 0, 0]).unwrap();
        assert!(g.dealias_mask()[keep]);
        assert!(!g.dealias_mask()[drop]);
    }

    #[test]
    fn conjugate_index_negates_mode() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let lin = g.mode_index([2, -5, 7]).unwrap();
        assert_eq!(g.mode(g.conjugate_index(lin)), [-2, 5, -7]);
    }
}
