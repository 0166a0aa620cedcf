use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::norms::{block_lp_norms, check_coverage};
use super::window::DyadicWindow;
use crate::error::{CsnsError, Result};
use crate::spectral::{PeriodicGrid, SpectralField};

type BlockTable = Arc<Vec<Vec<f64>>>;

/// Time samples of a field together with a per-`p` cache of block norms
/// `||Delta_j u(t_i)||_{L^p}`, indexed `[i][j - j_min]`.
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    window: DyadicWindow,
    cache: Mutex<HashMap<u64, BlockTable>>,
}

impl Clone for Trajectory {
    fn clone(&self) -> Self {
        Self {
            times: self.times.clone(),
            fields: self.fields.clone(),
            window: self.window,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl std::fmt::Debug for Trajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Trajectory")
            .field("samples", &self.times.len())
            .field("t_first", &self.times.first())
            .field("t_last", &self.times.last())
            .field("window", &self.window)
            .finish()
    }
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| CsnsError::Precondition("trajectory needs samples".into()))?;
        let window = DyadicWindow::for_grid(first.grid());
        Self::with_window(times, fields, window)
    }

    pub fn with_window(
        times: Vec<f64>,
        fields: Vec<SpectralField>,
        window: DyadicWindow,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(CsnsError::Precondition(format!(
                "trajectory needs matching nonempty times ({}) and fields ({})",
                times.len(),
                fields.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CsnsError::Precondition(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        let ncomp = fields[0].ncomp();
        for f in &fields {
            f.check_same_grid(&fields[0])?;
            if f.ncomp() != ncomp {
                return Err(CsnsError::Precondition(
                    "trajectory fields differ in component count".into(),
                ));
            }
            check_coverage(f, &window)?;
        }
        Ok(Self {
            times,
            fields,
            window,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// A field held constant at the given times.
    pub fn constant(field: &SpectralField, times: Vec<f64>) -> Result<Self> {
        let fields = vec![field.clone(); times.len()];
        Self::new(times, fields)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.fields[0].grid()
    }

    pub fn ncomp(&self) -> usize {
        self.fields[0].ncomp()
    }

    pub fn window(&self) -> DyadicWindow {
        self.window
    }

    pub fn first(&self) -> &SpectralField {
        &self.fields[0]
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().unwrap()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.fields.iter().all(SpectralField::is_zero)
    }

    /// Same samples over a different window.
    pub fn rewindowed(&self, window: DyadicWindow) -> Result<Self> {
        Self::with_window(self.times.clone(), self.fields.clone(), window)
    }

    /// Block norms `[i][j - j_min]`, computed once per `p`.
    pub fn block_norms(&self, p: f64) -> Result<BlockTable> {
        let key = p.to_bits();
        if let Some(t) = self.cache.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let table: Vec<Vec<f64>> = self
            .fields
            .iter()
            .map(|f| block_lp_norms(f, &self.window, p))
            .collect::<Result<_>>()?;
        let table = Arc::new(table);
        self.cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| table.clone());
        Ok(table)
    }

    /// Apply `f` to every sample.
    pub fn map(&self, f: impl Fn(&SpectralField) -> Result<SpectralField>) -> Result<Trajectory> {
        let fields = self.fields.iter().map(f).collect::<Result<Vec<_>>>()?;
        Trajectory::with_window(self.times.clone(), fields, self.window)
    }

    /// Pointwise-in-time combination of two trajectories on the same mesh.
    pub fn zip_map(
        &self,
        other: &Trajectory,
        f: impl Fn(&SpectralField, &SpectralField) -> Result<SpectralField>,
    ) -> Result<Trajectory> {
        self.check_same_mesh(other)?;
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::with_window(self.times.clone(), fields, self.window.union(&other.window))
    }

    pub fn check_same_mesh(&self, other: &Trajectory) -> Result<()> {
        if self.times != other.times {
            return Err(CsnsError::Precondition(
                "trajectories sampled on different time meshes".into(),
            ));
        }
        Ok(())
    }

    /// Times multiplied by `factor`.
    pub fn with_scaled_times(&self, factor: f64) -> Result<Trajectory> {
        let times = self.times.iter().map(|t| t * factor).collect();
        Trajectory::with_window(times, self.fields.clone(), self.window)
    }

    /// Samples with index in `range`.
    pub fn slice(&self, range: std::ops::RangeInclusive<usize>) -> Result<Trajectory> {
        let (a, b) = (*range.start(), *range.end());
        Trajectory::with_window(
            self.times[a..=b].to_vec(),
            self.fields[a..=b].to_vec(),
            self.window,
        )
    }

    /// Index of the sample equal to `t` within a relative tolerance.
    pub fn index_of_time(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * self.t_end().abs().max(1.0);
        self.times.iter().position(|&s| (s - t).abs() <= tol)
    }

    /// Local cubic Lagrange interpolation in time (linear for two samples).
    pub fn sample_at(&self, t: f64) -> Result<SpectralField> {
        let n = self.times.len();
        let tol = 1e-12 * self.t_end().abs().max(1.0);
        if t < self.times[0] - tol || t > self.t_end() + tol {
            return Err(CsnsError::Precondition(format!(
                "time {t} outside trajectory range [{}, {}]",
                self.times[0],
                self.t_end()
            )));
        }
        if let Some(i) = self.index_of_time(t) {
            return Ok(self.fields[i].clone());
        }
        if n == 1 {
            return Ok(self.fields[0].clone());
        }
        let upper = self.times.partition_point(|&s| s < t).clamp(1, n - 1);
        let width = n.min(4);
        let start = (upper as isize - (width as isize / 2)).clamp(0, (n - width) as isize) as usize;
        let nodes = &self.times[start..start + width];
        let mut acc = SpectralField::zeros(self.grid(), self.ncomp());
        for (a, &ta) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (b, &tb) in nodes.iter().enumerate() {
                if a != b {
                    w *= (t - tb) / (ta - tb);
                }
            }
            acc.add_scaled(w, &self.fields[start + a])?;
        }
        acc.set_divergence_free(
            self.fields[start..start + width]
                .iter()
                .all(|f| f.is_divergence_free()),
        );
        Ok(acc)
    }

    /// Interpolate onto a new mesh inside the current time range.
    pub fn resample(&self, times: &[f64]) -> Result<Trajectory> {
        let fields = times
            .iter()
            .map(|&t| self.sample_at(t))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::with_window(times.to_vec(), fields, self.window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::heat_semigroup;
    use crate::spectral::random::random_solenoidal;
    use std::f64::consts::PI;

    #[test]
    fn cache_matches_recomputation() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let u = random_solenoidal(&g, 3, 4, -1.0, 1.0);
        let times = vec![0.0, 0.1, 0.3];
        let fields = times
            .iter()
            .map(|&t| heat_semigroup(&u, t).unwrap())
            .collect();
        let tr = Trajectory::new(times, fields).unwrap();
        let cached = tr.block_norms(3.0).unwrap();
        let again = tr.block_norms(3.0).unwrap();
        assert!(Arc::ptr_eq(&cached, &again));
        for (i, f) in tr.fields().iter().enumerate() {
            let fresh = block_lp_norms(f, &tr.window(), 3.0).unwrap();
            for (a, b) in fresh.iter().zip(&cached[i]) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn rejects_unordered_times() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let z = SpectralField::zeros(&g, 3);
        assert!(Trajectory::new(vec![0.0, 0.0], vec![z.clone(), z.clone()]).is_err());
        assert!(Trajectory::new(vec![], vec![]).is_err());
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let u = random_solenoidal(&g, 1, 3, 0.0, 1.0);
        let poly = |t: f64| 1.0 + 2.0 * t - t * t + 0.5 * t * t * t;
        let times: Vec<f64> = (0..6).map(|i| i as f64 * 0.2).collect();
        let tr = Trajectory::new(
            times.clone(),
            times.iter().map(|&t| u.scale(poly(t))).collect(),
        )
        .unwrap();
        let mid = tr.sample_at(0.53).unwrap();
        assert!(mid.max_abs_diff(&u.scale(poly(0.53))) < 1e-13);
        assert!(tr.sample_at(1.5).is_err());
    }
}
