//! The scaling operator `U -> U((x - x0) / lambda)` and its inverse, in space
//! and, for trajectories, in time through `t -> t / lambda^2`.

use super::scale_core::ScaleCore;
use crate::besov::Trajectory;
use crate::error::{CsnsError, Result};
use crate::spectral::rescale::{contract, dilate};
use crate::spectral::SpectralField;

fn scaled(core: [f64; 3], factor: f64) -> [f64; 3] {
    [core[0] * factor, core[1] * factor, core[2] * factor]
}

/// `(Lambda u)(x) = u((x - x0) / lambda)`, unit amplitude.
pub fn apply_lambda(u: &SpectralField, sc: ScaleCore) -> Result<SpectralField> {
    let sc = sc.reduced(u.grid().period());
    let m = sc.exponent;
    if m >= 0 {
        dilate(u, m as u32, sc.core)
    } else {
        // u(2^{-|m|} (x - x0)) = u(2^{-|m|} x + x0'), x0' = -2^{-|m|} x0.
        let k = m.unsigned_abs();
        contract(u, k, scaled(sc.core, -sc.lambda().recip()), true)
    }
}

fn inverse_impl(f: &SpectralField, sc: ScaleCore, strict: bool) -> Result<SpectralField> {
    let sc = sc.reduced(f.grid().period());
    let m = sc.exponent;
    if m >= 0 {
        contract(f, m as u32, sc.core, strict)
    } else {
        // f(2^{|m|} y + x0) = f(2^{|m|} (y - x0')), x0' = -2^{-|m|} x0.
        dilate(f, m.unsigned_abs(), scaled(sc.core, -sc.lambda().recip()))
    }
}

/// `(Lambda^{-1} f)(y) = f(lambda y + x0)`; modes off the required lattice are an error.
pub fn apply_lambda_inverse(f: &SpectralField, sc: ScaleCore) -> Result<SpectralField> {
    inverse_impl(f, sc, true)
}

/// As [`apply_lambda_inverse`], discarding modes that no `Lambda`-image can carry.
pub fn apply_lambda_inverse_projecting(f: &SpectralField, sc: ScaleCore) -> Result<SpectralField> {
    inverse_impl(f, sc, false)
}

/// `(Lambda U)(t) = Lambda U(t / lambda^2)`.
///
/// Without `target_times` the samples are relabeled `t -> lambda^2 t`; with
/// them, `U` is interpolated at `t / lambda^2` for each target time.
pub fn apply_lambda_trajectory(
    u: &Trajectory,
    sc: ScaleCore,
    target_times: Option<&[f64]>,
) -> Result<Trajectory> {
    let l2 = sc.lambda().powi(2);
    let (times, sources): (Vec<f64>, Vec<SpectralField>) = match target_times {
        None => (
            u.times().iter().map(|t| t * l2).collect(),
            u.fields().to_vec(),
        ),
        Some(ts) => {
            let src = ts
                .iter()
                .map(|t| u.sample_at(t / l2))
                .collect::<Result<Vec<_>>>()?;
            (ts.to_vec(), src)
        }
    };
    let fields = sources
        .iter()
        .map(|f| apply_lambda(f, sc))
        .collect::<Result<Vec<_>>>()?;
    window_for(times, fields, u, sc.exponent)
}

/// `(Lambda^{-1} F)(s) = Lambda^{-1} F(lambda^2 s)`, relabeling sample times.
pub fn apply_lambda_inverse_trajectory(f: &Trajectory, sc: ScaleCore) -> Result<Trajectory> {
    let l2 = sc.lambda().powi(2);
    let times = f.times().iter().map(|t| t / l2).collect();
    let fields = f
        .fields()
        .iter()
        .map(|u| apply_lambda_inverse(u, sc))
        .collect::<Result<Vec<_>>>()?;
    window_for(times, fields, f, -sc.exponent)
}

fn window_for(
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    source: &Trajectory,
    shift: i32,
) -> Result<Trajectory> {
    let window = source.window().shifted(shift).union(&source.window());
    Trajectory::with_window(times, fields, window).map_err(|e| match e {
        CsnsError::WindowCoverage { .. } => {
            CsnsError::Precondition(format!("rescaled trajectory leaves the dyadic window: {e}"))
        }
        other => other,
    })
}
