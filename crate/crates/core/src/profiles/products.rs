//! Decay of products of rescaled factors along orthogonal scale-core sequences.

use serde::Serialize;

use super::lambda::apply_lambda;
use super::scale_core::ScaleCore;
use crate::besov::{critical_chemin_lerner, Trajectory};
use crate::error::{CsnsError, Result};
use crate::spectral::{outer_product, SpectralField};

/// The two unscaled factors of a product `(Lambda_1 a)(Lambda_2 b)`.
#[derive(Clone, Copy, Debug)]
pub enum ProductPair<'a> {
    /// Measured in `L^a([0, T_n], B^{s_p + 2/a - 1}_{p,p})`, `T_n = min(lambda_1^2, lambda_2^2) T`.
    Trajectories(&'a Trajectory, &'a Trajectory),
    /// Time-independent first factor; measured in `L^r([0, T'_n], B^{s_p + 2/r - 1}_{p,p})`,
    /// `T'_n = lambda_2^2 T`.
    SteadyAndTrajectory(&'a SpectralField, &'a Trajectory),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProductParams {
    pub p: f64,
    /// `a` for two trajectories, `r` for a steady first factor.
    pub time_exponent: f64,
    /// Horizon `T` of the unscaled factors.
    pub horizon: f64,
}

fn check_params(pair: &ProductPair<'_>, params: &ProductParams) -> Result<()> {
    let (p, e) = (params.p, params.time_exponent);
    if !(p > 3.0) {
        return Err(CsnsError::Precondition(format!(
            "product decay needs p > 3, got {p}"
        )));
    }
    match pair {
        ProductPair::Trajectories(..) => {
            let inv = 1.0 / e;
            if !(1.0 - 3.0 / p < inv && inv < 1.0) {
                return Err(CsnsError::Precondition(format!(
                    "need 1 - 3/p < 1/a < 1, got a = {e}, p = {p}"
                )));
            }
        }
        ProductPair::SteadyAndTrajectory(..) => {
            if !(2.0 < e && e < 2.0 * p / (p - 3.0)) {
                return Err(CsnsError::Precondition(format!(
                    "need 2 < r < 2p/(p-3), got r = {e}, p = {p}"
                )));
            }
        }
    }
    Ok(())
}

fn check_exact_product(a: &SpectralField, b: &SpectralField) -> Result<()> {
    let half = a.grid().n() as i64 / 2;
    let reach = a.max_frequency() + b.max_frequency();
    if reach >= half {
        return Err(CsnsError::SupportViolation(format!(
            "product reaches |k_i| = {reach}, beyond the alias-free limit {}",
            half - 1
        )));
    }
    Ok(())
}

/// Product norm for each `n`, with the first factor rescaled by `first_seq[n]`
/// and the second by `second_seq[n]`.
pub fn product_orthogonality_decay(
    pair: ProductPair<'_>,
    first_seq: &[ScaleCore],
    second_seq: &[ScaleCore],
    params: &ProductParams,
) -> Result<Vec<f64>> {
    check_params(&pair, params)?;
    if first_seq.len() != second_seq.len() {
        return Err(CsnsError::Precondition(
            "scale-core sequences differ in length".into(),
        ));
    }
    first_seq
        .iter()
        .zip(second_seq)
        .map(|(sa, sb)| product_value(pair, *sa, *sb, params))
        .collect()
}

fn scaled_sample(tr: &Trajectory, sc: ScaleCore, t: f64) -> Result<SpectralField> {
    apply_lambda(&tr.sample_at(t / sc.lambda().powi(2))?, sc)
}

fn within(times: &[f64], scale: f64, horizon: f64) -> Vec<f64> {
    times
        .iter()
        .map(|t| t * scale)
        .filter(|&t| t <= horizon * (1.0 + 1e-12))
        .collect()
}

fn product_value(
    pair: ProductPair<'_>,
    sa: ScaleCore,
    sb: ScaleCore,
    params: &ProductParams,
) -> Result<f64> {
    let (l1, l2) = (sa.lambda().powi(2), sb.lambda().powi(2));
    // Mesh: samples of the faster factor, relabeled into the scaled time frame.
    let mesh = match pair {
        ProductPair::Trajectories(v, w) => {
            let horizon = l1.min(l2) * params.horizon;
            if l2 <= l1 {
                within(w.times(), l2, horizon)
            } else {
                within(v.times(), l1, horizon)
            }
        }
        ProductPair::SteadyAndTrajectory(_, v) => within(v.times(), l2, l2 * params.horizon),
    };
    if mesh.len() < 2 {
        return Err(CsnsError::Precondition(
            "product mesh needs at least two samples in the horizon".into(),
        ));
    }
    let steady = match pair {
        ProductPair::SteadyAndTrajectory(u, _) => Some(apply_lambda(u, sa)?),
        ProductPair::Trajectories(..) => None,
    };
    let mut fields = Vec::with_capacity(mesh.len());
    for &t in &mesh {
        let (a, b) = match pair {
            ProductPair::Trajectories(v, w) => (scaled_sample(v, sa, t)?, scaled_sample(w, sb, t)?),
            ProductPair::SteadyAndTrajectory(_, v) => (
                steady.clone().expect("steady factor"),
                scaled_sample(v, sb, t)?,
            ),
        };
        check_exact_product(&a, &b)?;
        fields.push(outer_product(&a, &b)?);
    }
    let tr = Trajectory::new(mesh, fields)?;
    let e = params.time_exponent;
    critical_chemin_lerner(&tr, e, params.p, 2.0 / e - 1.0)
}

/// `delta` in a least-squares fit `value_n ~ C 2^{-delta n}`; zero values are skipped.
pub fn geometric_decay_exponent(values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(n, v)| (n as f64, v.log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    Some(-num / den)
}
