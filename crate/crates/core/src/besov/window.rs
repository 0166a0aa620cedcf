use serde::{Deserialize, Serialize};

use crate::error::{CsnsError, Result};
use crate::spectral::PeriodicGrid;

/// Radial cutoff: 1 on `r <= 1`, 0 on `r >= 2`, and in between a degree-7
/// smoothstep in `log2 r` (three matching derivatives at both ends).
pub fn cutoff_profile(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let t = r.log2();
        let t4 = t * t * t * t;
        1.0 - t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
    }
}

/// Symbol of the low-pass operator `S_j` at `|xi| = r`.
pub fn low_pass_symbol(j: i32, r: f64) -> f64 {
    cutoff_profile(r * 2f64.powi(-j))
}

/// Symbol of the block `Delta_j = S_{j+1} - S_j`, supported in `2^j < r < 2^{j+2}`.
pub fn block_symbol(j: i32, r: f64) -> f64 {
    low_pass_symbol(j + 1, r) - low_pass_symbol(j, r)
}

/// Finite range of dyadic block indices `j_min..=j_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicWindow {
    pub j_min: i32,
    pub j_max: i32,
}

impl DyadicWindow {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return Err(CsnsError::Precondition(format!(
                "empty dyadic window [{j_min}, {j_max}]"
            )));
        }
        Ok(Self { j_min, j_max })
    }

    /// Window covering every representable nonzero wavenumber of `grid`.
    pub fn for_grid(grid: &PeriodicGrid) -> Self {
        let j_max = grid.xi_max().log2().ceil() as i32;
        let j_min = grid.unit_wavenumber().log2().floor() as i32 - 1;
        Self { j_min, j_max }
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn len(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumbers where the blocks sum to one: `2^{j_min+1} <= |xi| <= 2^{j_max+1}`.
    pub fn covers(&self, r: f64) -> bool {
        r >= 2f64.powi(self.j_min + 1) && r <= 2f64.powi(self.j_max + 1)
    }

    /// Shift both ends by `m`.
    pub fn shifted(&self, m: i32) -> Self {
        Self {
            j_min: self.j_min + m,
            j_max: self.j_max + m,
        }
    }

    /// Smallest window containing both.
    pub fn union(&self, other: &DyadicWindow) -> Self {
        Self {
            j_min: self.j_min.min(other.j_min),
            j_max: self.j_max.max(other.j_max),
        }
    }
}
