//! Navier-Stokes scaling on the torus and the `L^3` identity check.
//!
//! `apply_lambda` keeps unit amplitude, which preserves `L^3` on the box but
//! does not map solutions to solutions. The operators here carry the extra
//! amplitude `1/lambda` and the time change `t -> lambda^2 t`, under which a
//! Navier-Stokes solution on the box is mapped to another one exactly.

use crate::besov::{lp_norm, Trajectory};
use crate::error::{CsnsError, Result};
use crate::flows::SolverConfig;
use crate::profiles::{apply_lambda, apply_lambda_inverse_projecting, ScaleCore};
use crate::spectral::rescale::dyadic_exponent;
use crate::spectral::SpectralField;

/// `lambda^{-1} u((x - x0) / lambda)`.
pub fn ns_rescale(u: &SpectralField, sc: ScaleCore) -> Result<SpectralField> {
    Ok(apply_lambda(u, sc)?.scale(sc.lambda().recip()))
}

/// Zero the modes of `u` that a dilation by `2^m` would push out of the dealiased band.
pub fn truncate_for_dilation(u: &SpectralField, m: u32) -> SpectralField {
    let grid = u.grid();
    let limit = grid.n() as f64 / 2f64.powi(m as i32 + 1) * grid.dealias_fraction();
    let mut out = u.apply_symbol(|lin| {
        let k = grid.mode(lin);
        if k.iter().all(|c| c.unsigned_abs() as f64 <= limit) {
            1.0
        } else {
            0.0
        }
    });
    out.set_divergence_free(u.is_divergence_free());
    out
}

/// `lambda^{-1} U(t / lambda^2, (x - x0) / lambda)`, sample times relabeled.
///
/// A solution generates modes beyond any band; for `lambda < 1` those that
/// cannot be dilated on the grid are dropped first (see [`truncate_for_dilation`]).
pub fn ns_rescale_trajectory(u: &Trajectory, sc: ScaleCore) -> Result<Trajectory> {
    let amp = sc.lambda().recip();
    let src = if sc.exponent > 0 {
        u.map(|f| Ok(truncate_for_dilation(f, sc.exponent as u32)))?
    } else {
        u.clone()
    };
    crate::profiles::apply_lambda_trajectory(&src, sc, None)?.map(|f| Ok(f.scale(amp)))
}

/// `lambda F(lambda^2 s, lambda y + x0)`. Modes that no rescaled field can
/// carry are dropped, so this is exact only on images of [`ns_rescale_trajectory`].
pub fn ns_rescale_inverse_trajectory(f: &Trajectory, sc: ScaleCore) -> Result<Trajectory> {
    if sc == ScaleCore::IDENTITY {
        return Ok(f.clone());
    }
    let l = sc.lambda();
    let times = f.times().iter().map(|t| t / (l * l)).collect();
    let fields = f
        .fields()
        .iter()
        .map(|u| Ok(apply_lambda_inverse_projecting(u, sc)?.scale(l)))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times, fields)
}

/// Solver settings for a run in the frame of scale `lambda`: step and horizon
/// both multiplied by `lambda^2`, so the rescaled run sees the same mesh.
pub fn rescaled_config(cfg: &SolverConfig, exponent: i32) -> SolverConfig {
    let factor = 4f64.powi(-exponent);
    SolverConfig {
        dt: cfg.dt * factor,
        t_end: cfg.t_end * factor,
        ..cfg.clone()
    }
}

/// `| ||Lambda u0||_{L^3} / ||u0||_{L^3} - 1 |` for the unit-amplitude rescale at a dyadic `lambda`.
pub fn norm_scaling_identity_check(u0: &SpectralField, lambda: f64) -> Result<f64> {
    let exponent = dyadic_exponent(lambda)?;
    let base = lp_norm(u0, 3.0)?;
    if base == 0.0 {
        return Err(CsnsError::Precondition(
            "identity check needs nonzero data".into(),
        ));
    }
    let image = apply_lambda(u0, ScaleCore::new(exponent, [0.0; 3]))?;
    Ok((lp_norm(&image, 3.0)? / base - 1.0).abs())
}
