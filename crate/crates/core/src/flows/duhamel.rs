//! The bilinear Duhamel term `B(u, v)(t) = -int_0^t e^{(t-s) Delta} P div(u (x) v)(s) ds`.

use rustfft::num_complex::Complex64;

use super::exponential::phi_functions;
use crate::besov::Trajectory;
use crate::error::{CsnsError, Result};
use crate::spectral::{nonlinear_q, SpectralField};

/// `-Q(u, v) / 2`, i.e. `-P div` of the symmetrized product.
fn source(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    Ok(nonlinear_q(u, v)?.scale(-0.5))
}

/// Quadrature of `B(u, v)(t)` on the common mesh of `u` and `v`.
///
/// The source is linear in time on each mesh interval (the last one is cut
/// at `t`), and each interval is integrated against the exact heat propagator.
pub fn duhamel_b(u: &Trajectory, v: &Trajectory, t: f64) -> Result<SpectralField> {
    u.check_same_mesh(v)?;
    let times = u.times();
    let tol = 1e-12 * t.abs().max(1.0);
    if times[0].abs() > tol || u.t_end() < t - tol || t < 0.0 {
        return Err(CsnsError::Precondition(format!(
            "mesh [{}, {}] does not cover [0, {t}]",
            times[0],
            u.t_end()
        )));
    }
    let grid = u.grid().clone();
    let mut acc = SpectralField::zeros(&grid, 3);
    acc.set_divergence_free(true);
    if t <= tol || u.is_zero() || v.is_zero() {
        return Ok(acc);
    }
    let unit_sq = grid.unit_wavenumber().powi(2);
    let max_k_sq = grid.k_sq_table().iter().copied().max().unwrap_or(0) as usize;
    let ks = grid.k_sq_table();

    let mut left = source(&u.fields()[0], &v.fields()[0])?;
    let mut a = 0.0;
    let mut i = 1;
    while a < t - tol {
        let (b, right) = if times[i] <= t + tol {
            let b = times[i].min(t);
            (b, source(&u.fields()[i], &v.fields()[i])?)
        } else {
            (t, source(&u.sample_at(t)?, &v.sample_at(t)?)?)
        };
        let h = b - a;
        // int_0^h e^{-k(h-r)} (S_a + r/h (S_b - S_a)) dr = h[(phi1 - phi2) S_a + phi2 S_b]
        let mut decay = vec![0.0; max_k_sq + 1];
        let mut w_left = vec![0.0; max_k_sq + 1];
        let mut w_right = vec![0.0; max_k_sq + 1];
        for k in 0..=max_k_sq {
            let phi = phi_functions(-unit_sq * k as f64 * h);
            decay[k] = phi[0];
            w_left[k] = h * (phi[1] - phi[2]);
            w_right[k] = h * phi[2];
        }
        let comps = (0..3)
            .map(|c| {
                acc.coeffs(c)
                    .iter()
                    .zip(left.coeffs(c))
                    .zip(right.coeffs(c))
                    .zip(ks)
                    .map(|(((x, l), r), &k)| {
                        let k = k as usize;
                        x * decay[k] + l * w_left[k] + r * w_right[k]
                    })
                    .collect::<Vec<Complex64>>()
            })
            .collect();
        acc = SpectralField::from_parts(&grid, comps, true);
        left = right;
        a = b;
        i += 1;
    }
    Ok(acc)
}
