//! Space-time norms over trajectories: Chemin-Lerner, Lebesgue-in-time and the
//! mixed `L^{a:b}_p` spaces.

use std::ops::RangeInclusive;

use super::norms::{critical_regularity, lp_norm, sequence_norm, BesovSpec};
use super::trajectory::Trajectory;
use crate::error::{CsnsError, Result};

/// Trapezoid `L^rho` norm of nonnegative samples; `rho = inf` is the max.
pub fn time_norm(times: &[f64], values: &[f64], rho: f64) -> Result<f64> {
    if !(rho >= 1.0) {
        return Err(CsnsError::Precondition(format!(
            "time exponent must be >= 1, got {rho}"
        )));
    }
    if rho.is_infinite() {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    if times.len() < 2 {
        return Err(CsnsError::Precondition(
            "finite time exponent needs at least two samples".into(),
        ));
    }
    let mut acc = 0.0;
    for i in 0..times.len() - 1 {
        let h = times[i + 1] - times[i];
        acc += 0.5 * h * (values[i].powf(rho) + values[i + 1].powf(rho));
    }
    Ok(acc.powf(1.0 / rho))
}

fn full_range(tr: &Trajectory) -> RangeInclusive<usize> {
    0..=tr.len() - 1
}

fn check_range(tr: &Trajectory, range: &RangeInclusive<usize>) -> Result<()> {
    if range.is_empty() || *range.end() >= tr.len() {
        return Err(CsnsError::Precondition(format!(
            "sample range {range:?} invalid for {} samples",
            tr.len()
        )));
    }
    Ok(())
}

fn check_window(tr: &Trajectory, spec: &BesovSpec) -> Result<()> {
    if spec.window != tr.window() {
        return Err(CsnsError::Precondition(
            "norm window differs from the trajectory window".into(),
        ));
    }
    Ok(())
}

/// `l^q_j ( 2^{js} || ||Delta_j u(t)||_{L^p} ||_{L^rho_t} )` over the samples in `range`.
pub fn chemin_lerner_norm_on(
    tr: &Trajectory,
    range: RangeInclusive<usize>,
    rho: f64,
    spec: &BesovSpec,
) -> Result<f64> {
    check_range(tr, &range)?;
    check_window(tr, spec)?;
    let table = tr.block_norms(spec.p)?;
    let times = &tr.times()[range.clone()];
    let mut per_block = Vec::with_capacity(spec.window.len());
    let mut column = vec![0.0; times.len()];
    for (jj, j) in spec.window.indices().enumerate() {
        for (slot, i) in column.iter_mut().zip(range.clone()) {
            *slot = table[i][jj];
        }
        per_block.push(spec.weight(j) * time_norm(times, &column, rho)?);
    }
    Ok(sequence_norm(per_block, spec.q))
}

/// Chemin-Lerner norm over the whole trajectory.
pub fn chemin_lerner_norm(tr: &Trajectory, rho: f64, spec: &BesovSpec) -> Result<f64> {
    chemin_lerner_norm_on(tr, full_range(tr), rho, spec)
}

/// Lebesgue-in-time norm `|| ||u(t)||_{B^s_{p,q}} ||_{L^rho_t}` (time norm outside).
pub fn lebesgue_time_besov_norm_on(
    tr: &Trajectory,
    range: RangeInclusive<usize>,
    rho: f64,
    spec: &BesovSpec,
) -> Result<f64> {
    check_range(tr, &range)?;
    check_window(tr, spec)?;
    let table = tr.block_norms(spec.p)?;
    let values: Vec<f64> = range
        .clone()
        .map(|i| {
            sequence_norm(
                spec.window
                    .indices()
                    .zip(&table[i])
                    .map(|(j, b)| spec.weight(j) * b),
                spec.q,
            )
        })
        .collect();
    time_norm(&tr.times()[range], &values, rho)
}

pub fn lebesgue_time_besov_norm(tr: &Trajectory, rho: f64, spec: &BesovSpec) -> Result<f64> {
    lebesgue_time_besov_norm_on(tr, full_range(tr), rho, spec)
}

/// `|| ||u(t)||_{L^p} ||_{L^rho_t}`.
pub fn lebesgue_time_lp_norm(tr: &Trajectory, rho: f64, p: f64) -> Result<f64> {
    let values = tr
        .fields()
        .iter()
        .map(|f| lp_norm(f, p))
        .collect::<Result<Vec<_>>>()?;
    time_norm(tr.times(), &values, rho)
}

/// `L^{a:b}_p`: the larger of the Chemin-Lerner norms in `L^a B^{s_p+2/a}_{p,p}` and `L^b B^{s_p+2/b}_{p,p}`.
pub fn mixed_space_norm_on(
    tr: &Trajectory,
    range: RangeInclusive<usize>,
    a: f64,
    b: f64,
    p: f64,
) -> Result<f64> {
    if a > b {
        return Err(CsnsError::Precondition(format!(
            "mixed space needs a <= b, got a={a}, b={b}"
        )));
    }
    let sp = critical_regularity(p);
    let spec_a = BesovSpec::new(sp + 2.0 / a, p, p, tr.window())?;
    let first = chemin_lerner_norm_on(tr, range.clone(), a, &spec_a)?;
    if a == b {
        return Ok(first);
    }
    let spec_b = BesovSpec::new(sp + 2.0 / b, p, p, tr.window())?;
    Ok(first.max(chemin_lerner_norm_on(tr, range, b, &spec_b)?))
}

pub fn mixed_space_norm(tr: &Trajectory, a: f64, b: f64, p: f64) -> Result<f64> {
    mixed_space_norm_on(tr, full_range(tr), a, b, p)
}

/// `L^rho_t B^{s_p + shift}_{p,p}` in the Chemin-Lerner sense.
pub fn critical_chemin_lerner(tr: &Trajectory, rho: f64, p: f64, shift: f64) -> Result<f64> {
    chemin_lerner_norm(tr, rho, &BesovSpec::critical(p, shift, tr.window())?)
}

pub fn critical_chemin_lerner_on(
    tr: &Trajectory,
    range: RangeInclusive<usize>,
    rho: f64,
    p: f64,
    shift: f64,
) -> Result<f64> {
    chemin_lerner_norm_on(tr, range, rho, &BesovSpec::critical(p, shift, tr.window())?)
}
