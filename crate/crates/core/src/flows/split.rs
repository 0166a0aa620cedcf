//! Greedy splitting of `[0, T]` into pieces on which a drift is small.

use serde::Serialize;

use crate::besov::{critical_chemin_lerner_on, Trajectory};
use crate::error::{CsnsError, Result};

#[derive(Clone, Debug, Serialize)]
pub struct SplitSchedule {
    /// `T_1 = 0 < T_2 < ... < T_N = T`.
    pub breakpoints: Vec<f64>,
    /// Sample index of each breakpoint.
    pub sample_indices: Vec<usize>,
    pub threshold: f64,
    /// Chemin-Lerner norm of the drift on each piece.
    pub measured_piece_norms: Vec<f64>,
    /// Set when the final piece ends at `T` without reaching the threshold.
    pub final_partial: bool,
    pub p: f64,
}

impl SplitSchedule {
    /// Number of breakpoints, `N`.
    pub fn count(&self) -> usize {
        self.breakpoints.len()
    }
}

/// Norm of `g` in `L^p_t B^{s_p + 2/p}_{p,p}` over samples `i0..=i1`.
pub fn piece_norm(g: &Trajectory, i0: usize, i1: usize, p: f64) -> Result<f64> {
    critical_chemin_lerner_on(g, i0..=i1, p, p, 2.0 / p)
}

/// Extend each piece while its norm stays `<= threshold`, bisecting over
/// sample indices for the last admissible endpoint.
pub fn split_intervals(g: &Trajectory, p: f64, threshold: f64) -> Result<SplitSchedule> {
    if !(threshold > 0.0) {
        return Err(CsnsError::Precondition(format!(
            "split threshold must be positive, got {threshold}"
        )));
    }
    if g.len() < 2 {
        return Err(CsnsError::Precondition(
            "splitting needs at least two time samples".into(),
        ));
    }
    let last = g.len() - 1;
    let times = g.times();
    let mut indices = vec![0];
    let mut norms = Vec::new();
    let mut start = 0;
    let mut final_partial = false;
    while start < last {
        let first = piece_norm(g, start, start + 1, p)?;
        if first > threshold {
            return Err(CsnsError::Precondition(format!(
                "single time step [{}, {}] already has norm {first:e} > {threshold:e}; refine the mesh",
                times[start],
                times[start + 1]
            )));
        }
        let whole = piece_norm(g, start, last, p)?;
        if whole <= threshold {
            indices.push(last);
            norms.push(whole);
            final_partial = true;
            break;
        }
        // Invariant: norm(start..=lo) <= threshold < norm(start..=hi).
        let (mut lo, mut hi) = (start + 1, last);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if piece_norm(g, start, mid, p)? <= threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        indices.push(lo);
        norms.push(piece_norm(g, start, lo, p)?);
        start = lo;
    }
    Ok(SplitSchedule {
        breakpoints: indices.iter().map(|&i| times[i]).collect(),
        sample_indices: indices,
        threshold,
        measured_piece_norms: norms,
        final_partial,
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::random_solenoidal;
    use crate::spectral::{PeriodicGrid, SpectralField};
    use std::f64::consts::PI;

    #[test]
    fn zero_drift_is_one_piece() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let tr = Trajectory::constant(&SpectralField::zeros(&g, 3), vec![0.0, 0.5, 1.0]).unwrap();
        let s = split_intervals(&tr, 4.0, 0.1).unwrap();
        assert_eq!(s.breakpoints, vec![0.0, 1.0]);
        assert_eq!(s.count(), 2);
    }

    #[test]
    fn constant_density_matches_scalar_greedy() {
        // A constant-in-time field has L^p_t norm rho0 * len^{1/p} on any piece,
        // so the greedy oracle on the scalar density gives piece length (theta / rho0)^p.
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let u = random_solenoidal(&g, 3, 3, -1.0, 1.0);
        let n = 201;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let tr = Trajectory::constant(&u, times.clone()).unwrap();
        let p = 4.0;
        let rho0 = piece_norm(&tr, 0, n - 1, p).unwrap();
        let theta = rho0 * 0.303f64.powf(1.0 / p);
        let s = split_intervals(&tr, p, theta).unwrap();
        // Oracle: scan a scalar density on the same mesh.
        let mut oracle = vec![0.0];
        let mut t0 = 0.0;
        loop {
            let end = times
                .iter()
                .copied()
                .filter(|&t| t > t0 && rho0 * (t - t0).powf(1.0 / p) <= theta * (1.0 + 1e-12))
                .fold(t0, f64::max);
            oracle.push(end);
            if end >= 1.0 {
                break;
            }
            t0 = end;
        }
        assert_eq!(s.breakpoints.len(), oracle.len());
        for (a, b) in s.breakpoints.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12, "{:?} vs {oracle:?}", s.breakpoints);
        }
        assert!(s.measured_piece_norms.iter().all(|&v| v <= theta));
        assert!(s.final_partial);
    }

    #[test]
    fn interior_pieces_saturate_and_concatenate() {
        let g = PeriodicGrid::new(16, 2.0 * PI).unwrap();
        let u = random_solenoidal(&g, 5, 3, -1.0, 1.0);
        let n = 101;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let fields = times.iter().map(|&t| u.scale(1.0 + t)).collect();
        let tr = Trajectory::new(times, fields).unwrap();
        let p = 4.0;
        let total = piece_norm(&tr, 0, n - 1, p).unwrap();
        let s = split_intervals(&tr, p, 0.6 * total).unwrap();
        let pieces = s.sample_indices.len() - 1;
        for k in 0..pieces {
            let (a, b) = (s.sample_indices[k], s.sample_indices[k + 1]);
            assert!(s.measured_piece_norms[k] <= s.threshold);
            if k + 1 < pieces || !s.final_partial {
                assert!(piece_norm(&tr, a, b + 1, p).unwrap() > s.threshold);
            }
        }
        let glued = s
            .measured_piece_norms
            .iter()
            .map(|v| v.powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        assert!(total <= glued * (1.0 + 1e-12));
        assert!(split_intervals(&tr, p, 1e-9).is_err());
    }
}
