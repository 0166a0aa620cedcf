//! Planted test fields with known concentration points.

use crate::besov::lp_norm;
use crate::error::Result;
use crate::spectral::{
    gradient, leray_project, Complex64, PeriodicGrid, PhysicalField, SpectralField,
};

/// `(w0 cos y + w1 cos z, w2 cos z + w3 cos x, w4 cos x + w5 cos y)` plus
/// `d (cos(y+z), cos(z+x), cos(x+y))`, in units of the lowest wavenumber.
///
/// Divergence-free with `|k_i| <= 1`. The axial part alone is odd under the
/// shift by half a period along the diagonal; the `d` term breaks that tie, so
/// for positive weights and `d > 0` the magnitude peaks only at the origin.
pub fn unit_shell_field(grid: &PeriodicGrid, w: [f64; 6], d: f64) -> Result<SpectralField> {
    let c = |x: f64| Complex64::new(0.5 * x, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let mut u = SpectralField::single_mode(grid, [1, 0, 0], &[z, c(w[3]), c(w[4])])?;
    u.add_scaled(
        1.0,
        &SpectralField::single_mode(grid, [0, 1, 0], &[c(w[0]), z, c(w[5])])?,
    )?;
    u.add_scaled(
        1.0,
        &SpectralField::single_mode(grid, [0, 0, 1], &[c(w[1]), c(w[2]), z])?,
    )?;
    u.add_scaled(
        1.0,
        &SpectralField::single_mode(grid, [0, 1, 1], &[c(d), z, z])?,
    )?;
    u.add_scaled(
        1.0,
        &SpectralField::single_mode(grid, [1, 0, 1], &[z, c(d), z])?,
    )?;
    u.add_scaled(
        1.0,
        &SpectralField::single_mode(grid, [1, 1, 0], &[z, z, c(d)])?,
    )?;
    leray_project(&u)
}

/// `curl(G a)` with `G` a Gaussian of width `sigma` centred at `center`
/// (minimum image), `a = (1, 1, 1) / sqrt 3`, scaled to unit `L^3` norm.
pub fn gaussian_vortex(grid: &PeriodicGrid, center: [f64; 3], sigma: f64) -> Result<SpectralField> {
    let l = grid.period();
    let bump = PhysicalField::from_fn(grid, 1, |x, out| {
        let r2: f64 = (0..3)
            .map(|d| {
                let r = (x[d] - center[d]).rem_euclid(l);
                let r = r.min(l - r);
                r * r
            })
            .sum();
        out[0] = (-r2 / (2.0 * sigma * sigma)).exp();
    });
    let g = gradient(&SpectralField::from_physical(&bump))?;
    let a = 1.0 / 3f64.sqrt();
    let (gx, gy, gz) = (g.coeffs(0), g.coeffs(1), g.coeffs(2));
    let comps = vec![
        gy.iter().zip(gz).map(|(y, z)| (y - z) * a).collect(),
        gz.iter().zip(gx).map(|(z, x)| (z - x) * a).collect(),
        gx.iter().zip(gy).map(|(x, y)| (x - y) * a).collect(),
    ];
    let u = leray_project(&SpectralField::from_coefficients(grid, comps)?)?;
    let norm = lp_norm(&u, 3.0)?;
    Ok(u.scale(1.0 / norm))
}

/// Scalar field with a Gaussian profile, centred at `center`, unit `L^3` norm.
pub fn gaussian_bump(grid: &PeriodicGrid, center: [f64; 3], sigma: f64) -> Result<SpectralField> {
    let l = grid.period();
    let bump = PhysicalField::from_fn(grid, 1, |x, out| {
        let r2: f64 = (0..3)
            .map(|d| {
                let r = (x[d] - center[d]).rem_euclid(l);
                let r = r.min(l - r);
                r * r
            })
            .sum();
        out[0] = (-r2 / (2.0 * sigma * sigma)).exp();
    });
    let u = SpectralField::from_physical(&bump);
    let norm = lp_norm(&u, 3.0)?;
    Ok(u.scale(1.0 / norm))
}
