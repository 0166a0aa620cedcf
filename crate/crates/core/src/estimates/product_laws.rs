//! Product laws in Chemin-Lerner Besov spaces, measured over trajectory pairs.

use serde::{Deserialize, Serialize};

use super::corpus::CorpusSpec;
use super::report::{ratio, EstimateReport};
use super::sweep::sweep;
use crate::besov::{
    chemin_lerner_norm, critical_chemin_lerner, critical_regularity, lp_norm, mixed_space_norm,
    BesovSpec, Trajectory,
};
use crate::error::{CsnsError, Result};
use crate::spectral::outer_product;

fn reject(gate: &str, detail: String) -> CsnsError {
    CsnsError::Precondition(format!("gate `{gate}` failed: {detail}"))
}

/// Pointwise tensor product `v (x) w` on the common mesh.
pub fn product_trajectory(v: &Trajectory, w: &Trajectory) -> Result<Trajectory> {
    v.zip_map(w, outer_product)
}

/// `||vw||_{L^r B^{s_p + 2/r - 1}_{p,p}} <= C ||v||_{L^inf B^{s_q + eps}_{q,q}} ||w||_{L^r B^{s_p + 2/r - eps}_{p,p}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Law1 {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub eps: f64,
}

impl Law1 {
    pub fn check(&self) -> Result<()> {
        let Law1 { p, q, r, eps } = *self;
        if !(p > 3.0 && q > 3.0) {
            return Err(reject("p, q > 3", format!("p = {p}, q = {q}")));
        }
        if !(r > 2.0) {
            return Err(reject("r > 2", format!("r = {r}")));
        }
        if !(critical_regularity(q) + critical_regularity(p) + 2.0 / r > 0.0) {
            return Err(reject(
                "s_q + s_p + 2/r > 0",
                format!("p = {p}, q = {q}, r = {r}"),
            ));
        }
        if !(eps.abs() < 1.0) {
            return Err(reject("|eps| < 1", format!("eps = {eps}")));
        }
        if !(1.0 - 2.0 / r + eps > 0.0) {
            return Err(reject("1 - 2/r + eps > 0", format!("r = {r}, eps = {eps}")));
        }
        Ok(())
    }

    pub fn ratio(&self, v: &Trajectory, w: &Trajectory) -> Result<f64> {
        let Law1 { p, q, r, eps } = *self;
        let lhs = critical_chemin_lerner(&product_trajectory(v, w)?, r, p, 2.0 / r - 1.0)?;
        let v_norm =
            chemin_lerner_norm(v, f64::INFINITY, &BesovSpec::critical(q, eps, v.window())?)?;
        let w_norm = critical_chemin_lerner(w, r, p, 2.0 / r - eps)?;
        Ok(ratio(lhs, v_norm * w_norm))
    }
}

/// `||vw||_{L^{r/2} B^{s_p + 4/r - 1}_{p,p}} <= C ||v||_{L^r B^{s_p + 2/r + eps}_{p,p}} ||w||_{L^r B^{s_p + 2/r - eps}_{p,p}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Law2 {
    pub p: f64,
    pub r: f64,
    pub eps: f64,
}

fn check_r_window(p: f64, r: f64) -> Result<()> {
    if !(p > 3.0) {
        return Err(reject("p > 3", format!("p = {p}")));
    }
    if !(2.0 < r && r < 2.0 * p / (p - 3.0)) {
        return Err(reject("2 < r < 2p/(p-3)", format!("p = {p}, r = {r}")));
    }
    Ok(())
}

impl Law2 {
    pub fn check(&self) -> Result<()> {
        check_r_window(self.p, self.r)?;
        if !(1.0 - 2.0 / self.r - self.eps.abs() > 0.0) {
            return Err(reject(
                "1 - 2/r - |eps| > 0",
                format!("r = {}, eps = {}", self.r, self.eps),
            ));
        }
        Ok(())
    }

    pub fn ratio(&self, v: &Trajectory, w: &Trajectory) -> Result<f64> {
        let Law2 { p, r, eps } = *self;
        let lhs = critical_chemin_lerner(&product_trajectory(v, w)?, r / 2.0, p, 4.0 / r - 1.0)?;
        let v_norm = critical_chemin_lerner(v, r, p, 2.0 / r + eps)?;
        let w_norm = critical_chemin_lerner(w, r, p, 2.0 / r - eps)?;
        Ok(ratio(lhs, v_norm * w_norm))
    }
}

/// `||vw||_{L^{r/2} B^{s_p + 4/r - 1}_{p,p}} <= C ||v||_{L^{r:inf}_{p1}} ||w||_{L^{r:inf}_{p2}}`, `1/p = 1/p1 + 1/p2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Law3 {
    pub p1: f64,
    pub p2: f64,
    pub r: f64,
}

impl Law3 {
    pub fn target_p(&self) -> f64 {
        1.0 / (1.0 / self.p1 + 1.0 / self.p2)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.p1 > 3.0 && self.p2 > 3.0) {
            return Err(reject(
                "p1, p2 > 3",
                format!("p1 = {}, p2 = {}", self.p1, self.p2),
            ));
        }
        check_r_window(self.target_p(), self.r)
    }

    pub fn ratio(&self, v: &Trajectory, w: &Trajectory) -> Result<f64> {
        let p = self.target_p();
        let lhs = critical_chemin_lerner(
            &product_trajectory(v, w)?,
            self.r / 2.0,
            p,
            4.0 / self.r - 1.0,
        )?;
        let v_norm = mixed_space_norm(v, self.r, f64::INFINITY, self.p1)?;
        let w_norm = mixed_space_norm(w, self.r, f64::INFINITY, self.p2)?;
        Ok(ratio(lhs, v_norm * w_norm))
    }
}

/// `||vw||_{L^{r0} B^{s_pbar + 2/r0 - 1}_{pbar,pbar}} <= C(p) ||w||_{L^inf L^3} ||v||_{L^{r0} B^{s_p + 2/r0}_{p,p}}`
/// with `r0 = 2p/(p-1)` and `1/pbar = 1/3 + 1/(6p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Law4 {
    pub p: f64,
}

impl Law4 {
    pub fn r0(&self) -> f64 {
        2.0 * self.p / (self.p - 1.0)
    }

    pub fn p_bar(&self) -> f64 {
        1.0 / (1.0 / 3.0 + 1.0 / (6.0 * self.p))
    }

    pub fn check(&self) -> Result<()> {
        if !(self.p > 3.0) {
            return Err(reject("p > 3", format!("p = {}", self.p)));
        }
        Ok(())
    }

    pub fn ratio(&self, v: &Trajectory, w: &Trajectory) -> Result<f64> {
        let (r0, pb) = (self.r0(), self.p_bar());
        let lhs = critical_chemin_lerner(&product_trajectory(v, w)?, r0, pb, 2.0 / r0 - 1.0)?;
        let mut w_sup: f64 = 0.0;
        for f in w.fields() {
            w_sup = w_sup.max(lp_norm(f, 3.0)?);
        }
        let v_norm = critical_chemin_lerner(v, r0, self.p, 2.0 / r0)?;
        Ok(ratio(lhs, w_sup * v_norm))
    }
}

fn pair_trajectories(
    corpus: &CorpusSpec,
    pair: &super::corpus::CorpusPair,
) -> Result<(Trajectory, Trajectory)> {
    Ok((
        corpus.heat_trajectory(&pair.first)?,
        corpus.heat_trajectory(&pair.second)?,
    ))
}

pub fn verify_product_law_1(
    corpus: &CorpusSpec,
    resolutions: &[usize],
    law: Law1,
) -> Result<EstimateReport> {
    law.check()?;
    let params = [("p", law.p), ("q", law.q), ("r", law.r), ("eps", law.eps)];
    sweep("product_law_1", &params, corpus, resolutions, |pair| {
        let (v, w) = pair_trajectories(corpus, pair)?;
        law.ratio(&v, &w)
    })
}

pub fn verify_product_law_2(
    corpus: &CorpusSpec,
    resolutions: &[usize],
    law: Law2,
) -> Result<EstimateReport> {
    law.check()?;
    let params = [("p", law.p), ("r", law.r), ("eps", law.eps)];
    sweep("product_law_2", &params, corpus, resolutions, |pair| {
        let (v, w) = pair_trajectories(corpus, pair)?;
        law.ratio(&v, &w)
    })
}

pub fn verify_product_law_3(
    corpus: &CorpusSpec,
    resolutions: &[usize],
    law: Law3,
) -> Result<EstimateReport> {
    law.check()?;
    let params = [("p1", law.p1), ("p2", law.p2), ("r", law.r)];
    sweep("product_law_3", &params, corpus, resolutions, |pair| {
        let (v, w) = pair_trajectories(corpus, pair)?;
        law.ratio(&v, &w)
    })
}

pub fn verify_product_law_4(
    corpus: &CorpusSpec,
    resolutions: &[usize],
    law: Law4,
) -> Result<EstimateReport> {
    law.check()?;
    let params = [("p", law.p), ("r0", law.r0()), ("p_bar", law.p_bar())];
    sweep("product_law_4", &params, corpus, resolutions, |pair| {
        let (v, w) = pair_trajectories(corpus, pair)?;
        law.ratio(&v, &w)
    })
}
