//! Reference Besov evaluation by direct summation.
//!
//! Shares nothing with the production pipeline except the FFT: the cutoff is
//! re-expanded in monomials, wavenumbers are rebuilt from their components,
//! each block is formed as `S_{j+1} u - S_j u` in physical space and the
//! quadrature is an explicit loop over grid points.

use crate::besov::BesovSpec;
use crate::spectral::SpectralField;

fn bump(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let t = r.ln() / std::f64::consts::LN_2;
    1.0 - (35.0 * t.powi(4) - 84.0 * t.powi(5) + 70.0 * t.powi(6) - 20.0 * t.powi(7))
}

fn low_pass_physical(u: &SpectralField, j: i32) -> Vec<Vec<f64>> {
    let g = u.grid();
    let unit = 2.0 * std::f64::consts::PI / g.period();
    let scale = 0.5f64.powi(j);
    let filtered = u.apply_symbol(|lin| {
        let k = g.mode(lin);
        let xi = [unit * k[0] as f64, unit * k[1] as f64, unit * k[2] as f64];
        bump(scale * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt())
    });
    filtered.to_physical().components().to_vec()
}

/// `||Delta_j u||_{L^p}` by direct summation.
pub fn block_lp_direct(u: &SpectralField, j: i32, p: f64) -> f64 {
    let hi = low_pass_physical(u, j + 1);
    let lo = low_pass_physical(u, j);
    let n = u.grid().len();
    let dv = u.grid().cell_volume();
    let mut acc = 0.0;
    let mut max: f64 = 0.0;
    for x in 0..n {
        let mut m2 = 0.0;
        for c in 0..hi.len() {
            let d = hi[c][x] - lo[c][x];
            m2 += d * d;
        }
        let m = m2.sqrt();
        max = max.max(m);
        if p.is_finite() {
            acc += m.powf(p) * dv;
        }
    }
    if p.is_infinite() {
        max
    } else {
        acc.powf(1.0 / p)
    }
}

/// Besov norm by direct summation over the window.
pub fn besov_norm_direct(u: &SpectralField, spec: &BesovSpec) -> f64 {
    let terms: Vec<f64> = spec
        .window
        .indices()
        .map(|j| 2f64.powf(spec.s * j as f64) * block_lp_direct(u, j, spec.p))
        .collect();
    if spec.q.is_infinite() {
        terms.into_iter().fold(0.0, f64::max)
    } else {
        terms
            .iter()
            .map(|t| t.powf(spec.q))
            .sum::<f64>()
            .powf(1.0 / spec.q)
    }
}
