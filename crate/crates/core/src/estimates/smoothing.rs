//! Heat decay on dyadic blocks and the smoothing effect of the Duhamel term.

use serde::{Deserialize, Serialize};

use super::corpus::CorpusSpec;
use super::product_laws::product_trajectory;
use super::report::{ratio, EstimateReport};
use super::sweep::sweep;
use crate::besov::{
    chemin_lerner_norm, dyadic_block, lp_norm, BesovSpec, DyadicWindow, Trajectory,
};
use crate::error::{CsnsError, Result};
use crate::flows::duhamel_b;
use crate::spectral::{heat_semigroup, SpectralField};

/// Largest `||Delta_j e^{t Delta} f||_p / (e^{-t 4^j} ||Delta_j f||_p)` over blocks and times.
pub fn heat_block_ratio(f: &SpectralField, p: f64, t_grid: &[f64]) -> Result<f64> {
    let window = DyadicWindow::for_grid(f.grid());
    let mut worst: f64 = 0.0;
    for j in window.indices() {
        let block = dyadic_block(f, j, &window).field;
        let base = lp_norm(&block, p)?;
        if base == 0.0 {
            continue;
        }
        for &t in t_grid {
            let decayed = lp_norm(&heat_semigroup(&block, t)?, p)?;
            worst = worst.max(decayed / ((-t * 4f64.powi(j)).exp() * base));
        }
    }
    Ok(worst)
}

/// Reports the largest block ratio as the constant `c0`; the exponential rate is fixed at 1.
pub fn verify_heat_block_decay(
    corpus: &CorpusSpec,
    resolutions: &[usize],
    p: f64,
    t_grid: &[f64],
) -> Result<EstimateReport> {
    if !(p >= 1.0) {
        return Err(CsnsError::Precondition(format!(
            "need p in [1, inf], got {p}"
        )));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(CsnsError::Precondition(
            "heat times must be finite and nonnegative".into(),
        ));
    }
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);
    sweep(
        "heat_block_decay",
        &[("p", p), ("t_max", t_max)],
        corpus,
        resolutions,
        |pair| {
            Ok(
                heat_block_ratio(&pair.first, p, t_grid)?.max(heat_block_ratio(
                    &pair.second,
                    p,
                    t_grid,
                )?),
            )
        },
    )
}

/// `B(u, v)` at every mesh time of `u`.
pub fn duhamel_trajectory(u: &Trajectory, v: &Trajectory) -> Result<Trajectory> {
    let fields = u
        .times()
        .iter()
        .map(|&t| duhamel_b(u, v, t))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(u.times().to_vec(), fields)
}

/// Exponents of `||B(u,v)||_{L^rt B^{s + 2 + 2(1/rt - 1/r)}_{p,p}} <= C ||u (x) v||_{L^r B^{s+1}_{p,p}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuhamelSmoothing {
    pub r: f64,
    pub r_tilde: f64,
    pub p: f64,
    pub s: f64,
}

impl DuhamelSmoothing {
    pub fn check(&self) -> Result<()> {
        if !(self.r >= 1.0) || !(self.p >= 1.0) {
            return Err(CsnsError::Precondition(format!(
                "need r, p >= 1, got r = {}, p = {}",
                self.r, self.p
            )));
        }
        if !(self.r_tilde >= self.r) {
            return Err(CsnsError::Precondition(format!(
                "need r_tilde in [r, inf], got r = {}, r_tilde = {}",
                self.r, self.r_tilde
            )));
        }
        Ok(())
    }

    pub fn ratio(&self, u: &Trajectory, v: &Trajectory) -> Result<f64> {
        let gain = 2.0 + 2.0 * (1.0 / self.r_tilde - 1.0 / self.r);
        let b = duhamel_trajectory(u, v)?;
        let lhs = chemin_lerner_norm(
            &b,
            self.r_tilde,
            &BesovSpec::new(self.s + gain, self.p, self.p, b.window())?,
        )?;
        let uv = product_trajectory(u, v)?;
        let rhs = chemin_lerner_norm(
            &uv,
            self.r,
            &BesovSpec::new(self.s + 1.0, self.p, self.p, uv.window())?,
        )?;
        Ok(ratio(lhs, rhs))
    }
}

pub fn verify_duhamel_smoothing(
    corpus: &CorpusSpec,
    resolutions: &[usize],
    law: DuhamelSmoothing,
) -> Result<EstimateReport> {
    law.check()?;
    let params = [
        ("r", law.r),
        ("r_tilde", law.r_tilde),
        ("p", law.p),
        ("s", law.s),
    ];
    sweep("duhamel_smoothing", &params, corpus, resolutions, |pair| {
        law.ratio(
            &corpus.heat_trajectory(&pair.first)?,
            &corpus.heat_trajectory(&pair.second)?,
        )
    })
}
