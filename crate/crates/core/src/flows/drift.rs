//! Empirical smallness of the linear drift operator `h -> Q(h, U)`.

use crate::besov::{critical_chemin_lerner, Trajectory};
use crate::error::{CsnsError, Result};
use crate::spectral::{nonlinear_q, SpectralField};

/// `max_h ||Q(h, U)||_{L^p B^{s_p + 2/p - 2}} / ||h||_{L^p B^{s_p + 2/p}}` over the probes.
pub fn drift_smallness_check(steady: &SpectralField, probes: &[Trajectory], p: f64) -> Result<f64> {
    if probes.is_empty() {
        return Err(CsnsError::Precondition(
            "drift check needs at least one probe".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for (i, h) in probes.iter().enumerate() {
        let denom = critical_chemin_lerner(h, p, p, 2.0 / p)?;
        if denom == 0.0 {
            return Err(CsnsError::Precondition(format!("probe {i} has zero norm")));
        }
        if steady.is_zero() {
            continue;
        }
        let image = h.map(|f| nonlinear_q(f, steady))?.rewindowed(h.window())?;
        let num = critical_chemin_lerner(&image, p, p, 2.0 / p - 2.0)?;
        worst = worst.max(num / denom);
    }
    Ok(worst)
}
