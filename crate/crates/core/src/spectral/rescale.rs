//! Exact dyadic dilations and phase translations in index space.
//!
//! On the torus the map `u -> u(2^m x)` sends the coefficient at `k` to `2^m k`.
//! With unit amplitude it preserves every `L^q` norm, since the dilated field is
//! `2^{3m}` periodic copies of `u`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::field::SpectralField;
use super::grid::PeriodicGrid;
use crate::error::{CsnsError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `exp(sign * i xi(k) . x0)` per FFT index, one table per axis.
fn phase_tables(grid: &PeriodicGrid, x0: [f64; 3], sign: f64) -> [Vec<Complex64>; 3] {
    let l = grid.period();
    let table = |x: f64| -> Vec<Complex64> {
        (0..grid.n())
            .map(|i| {
                let turns = (grid.freq(i) as f64 * x / l).rem_euclid(1.0);
                Complex64::from_polar(1.0, sign * 2.0 * PI * turns)
            })
            .collect()
    };
    [table(x0[0]), table(x0[1]), table(x0[2])]
}

fn is_origin(x0: [f64; 3]) -> bool {
    x0.iter().all(|&x| x == 0.0)
}

fn phase_at(tables: &[Vec<Complex64>; 3], idx: [usize; 3]) -> Complex64 {
    tables[0][idx[0]] * tables[1][idx[1]] * tables[2][idx[2]]
}

/// `v(x) = u(x - x0)`.
pub fn translate(u: &SpectralField, x0: [f64; 3]) -> SpectralField {
    if is_origin(x0) {
        return u.clone();
    }
    let grid = u.grid().clone();
    let tables = phase_tables(&grid, x0, -1.0);
    let mut out = u.clone();
    for c in out.components_mut() {
        for (lin, z) in c.iter_mut().enumerate() {
            if *z != ZERO {
                *z *= phase_at(&tables, grid.split_index(lin));
            }
        }
    }
    out
}

/// Largest `a` such that every excited wavevector lies in `2^a Z^3`; `None` for the zero field.
pub fn lattice_exponent(u: &SpectralField) -> Option<u32> {
    let grid = u.grid();
    let cap = (grid.n() / 2).trailing_zeros();
    let mut a: Option<u32> = None;
    for lin in u.support() {
        for k in grid.mode(lin) {
            if k != 0 {
                let tz = k.unsigned_abs().trailing_zeros();
                a = Some(a.map_or(tz, |v: u32| v.min(tz)));
            }
        }
    }
    a.map(|v| v.min(cap))
}

/// Check that `u` survives dilation by `2^m` without leaving the dealiased band.
pub fn check_dilation_support(u: &SpectralField, m: u32) -> Result<()> {
    let grid = u.grid();
    let limit = grid.n() as f64 / 2f64.powi(m as i32 + 1) * grid.dealias_fraction();
    let worst = u.max_frequency();
    if worst as f64 > limit {
        return Err(CsnsError::SupportViolation(format!(
            "dilation by 2^{m} needs |k_i| <= {limit}, field reaches {worst}"
        )));
    }
    Ok(())
}

/// `v(x) = u(2^m (x - x0))`: coefficient at `2^m k` equals `u_hat(k) e^{-i xi(2^m k).x0}`.
pub fn dilate(u: &SpectralField, m: u32, x0: [f64; 3]) -> Result<SpectralField> {
    check_dilation_support(u, m)?;
    if m == 0 {
        return Ok(translate(u, x0));
    }
    let grid = u.grid().clone();
    let factor = 1i64 << m;
    let tables = (!is_origin(x0)).then(|| phase_tables(&grid, x0, -1.0));
    let support = u.support();
    let mut comps = vec![vec![ZERO; grid.len()]; u.ncomp()];
    for lin in support {
        let k = grid.mode(lin);
        let target = [k[0] * factor, k[1] * factor, k[2] * factor];
        let tlin = grid.mode_index(target).expect("support checked");
        let phase = tables.as_ref().map(|t| phase_at(t, grid.split_index(tlin)));
        for (dst, src) in comps.iter_mut().zip(u.components()) {
            dst[tlin] = match phase {
                Some(p) => src[lin] * p,
                None => src[lin],
            };
        }
    }
    Ok(SpectralField::from_parts(
        &grid,
        comps,
        u.is_divergence_free(),
    ))
}

/// `v(y) = u(2^{-m} y + x0)`, the inverse of [`dilate`].
///
/// With `strict`, any excited mode off the lattice `2^m Z^3` is an error;
/// otherwise such modes are discarded.
pub fn contract(u: &SpectralField, m: u32, x0: [f64; 3], strict: bool) -> Result<SpectralField> {
    let grid = u.grid().clone();
    let factor = 1i64 << m;
    let tables = (!is_origin(x0)).then(|| phase_tables(&grid, x0, 1.0));
    let mut comps = vec![vec![ZERO; grid.len()]; u.ncomp()];
    for lin in u.support() {
        let k = grid.mode(lin);
        if k.iter().any(|c| c % factor != 0) {
            if strict {
                return Err(CsnsError::SupportViolation(format!(
                    "mode {k:?} is not on the lattice 2^{m} Z^3"
                )));
            }
            continue;
        }
        let tlin = grid
            .mode_index([k[0] / factor, k[1] / factor, k[2] / factor])
            .expect("contracted mode fits");
        let phase = tables.as_ref().map(|t| phase_at(t, grid.split_index(lin)));
        for (dst, src) in comps.iter_mut().zip(u.components()) {
            dst[tlin] = match phase {
                Some(p) => src[lin] * p,
                None => src[lin],
            };
        }
    }
    Ok(SpectralField::from_parts(
        &grid,
        comps,
        u.is_divergence_free(),
    ))
}

/// `L^3`-invariant dyadic rescale `u -> u((x - x0) / lambda)` with `lambda = 2^{-m}`.
pub fn scale_l3_invariant_rescale(
    u: &SpectralField,
    m: u32,
    x0: [f64; 3],
) -> Result<SpectralField> {
    dilate(u, m, x0)
}

/// Exponent `m` with `lambda = 2^{-m}`, or an error for non-dyadic `lambda`.
pub fn dyadic_exponent(lambda: f64) -> Result<i32> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CsnsError::Precondition(format!(
            "scale must be positive, got {lambda}"
        )));
    }
    let e = lambda.log2().round();
    if 2f64.powi(e as i32) != lambda {
        return Err(CsnsError::Precondition(format!(
            "scale {lambda} is not a power of two"
        )));
    }
    Ok(-(e as i32))
}
