//! Linear Fourier multipliers and the quadratic terms of the Navier-Stokes system.

use rustfft::num_complex::Complex64;

use super::fft;
use super::field::{strip_unrepresentable, PhysicalField, SpectralField};
use super::grid::PeriodicGrid;
use crate::error::{CsnsError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn require_vector(u: &SpectralField, what: &str) -> Result<()> {
    if u.ncomp() != 3 {
        return Err(CsnsError::Precondition(format!(
            "{what} needs a 3-component field, got {}",
            u.ncomp()
        )));
    }
    Ok(())
}

/// Per-mode projection `(I - k k^T / |k|^2) u_hat(k)`; the Nyquist planes are cleared.
pub fn leray_project(u: &SpectralField) -> Result<SpectralField> {
    require_vector(u, "Leray projection")?;
    let grid = u.grid().clone();
    let mut comps = u.components().to_vec();
    for lin in 1..grid.len() {
        if grid.is_nyquist(lin) {
            for c in comps.iter_mut() {
                c[lin] = ZERO;
            }
            continue;
        }
        let k = grid.mode(lin);
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let ksq = grid.k_sq(lin) as f64;
        let dot = comps[0][lin] * kf[0] + comps[1][lin] * kf[1] + comps[2][lin] * kf[2];
        let s = dot / ksq;
        for c in 0..3 {
            comps[c][lin] -= s * kf[c];
        }
    }
    Ok(SpectralField::from_parts(&grid, comps, true))
}

/// `e^{t Delta}`: multiply each mode by `exp(-|xi|^2 t)`.
pub fn heat_semigroup(u: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(CsnsError::Precondition(format!(
            "heat semigroup needs t >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(u.clone());
    }
    let table: Vec<f64> = u
        .grid()
        .xi_sq_table()
        .iter()
        .map(|k| (-k * t).exp())
        .collect();
    Ok(u.apply_symbol_table(&table))
}

/// `Delta^{-1}`: `u_hat(k) -> -u_hat(k) / |xi|^2`.
pub fn inverse_laplacian(u: &SpectralField) -> Result<SpectralField> {
    if u.components().iter().any(|c| c[0] != ZERO) {
        return Err(CsnsError::Precondition(
            "inverse Laplacian needs a zero mean mode".into(),
        ));
    }
    let table: Vec<f64> = u
        .grid()
        .xi_sq_table()
        .iter()
        .enumerate()
        .map(|(i, k)| if i == 0 { 0.0 } else { -1.0 / k })
        .collect();
    Ok(u.apply_symbol_table(&table))
}

pub fn laplacian(u: &SpectralField) -> SpectralField {
    let table: Vec<f64> = u.grid().xi_sq_table().iter().map(|k| -k).collect();
    u.apply_symbol_table(&table)
}

/// Zero the modes outside the dealias mask.
pub fn dealias(u: &SpectralField) -> SpectralField {
    let table: Vec<f64> = u
        .grid()
        .dealias_mask()
        .iter()
        .map(|&m| if m { 1.0 } else { 0.0 })
        .collect();
    let mut out = u.apply_symbol_table(&table);
    out.set_divergence_free(u.is_divergence_free());
    out
}

/// Gradient of a scalar field.
pub fn gradient(phi: &SpectralField) -> Result<SpectralField> {
    if phi.ncomp() != 1 {
        return Err(CsnsError::Precondition(
            "gradient needs a scalar field".into(),
        ));
    }
    let grid = phi.grid().clone();
    let unit = grid.unit_wavenumber();
    let src = phi.coeffs(0);
    let mut comps = vec![vec![ZERO; grid.len()]; 3];
    for lin in 0..grid.len() {
        if grid.is_nyquist(lin) {
            continue;
        }
        let k = grid.mode(lin);
        for c in 0..3 {
            comps[c][lin] = src[lin] * Complex64::new(0.0, unit * k[c] as f64);
        }
    }
    Ok(SpectralField::from_parts(&grid, comps, false))
}

/// Row-wise divergence of a 9-component tensor: `(div T)_i = sum_j d_j T_ij`.
pub fn divergence_of_tensor(t: &SpectralField) -> Result<SpectralField> {
    if t.ncomp() != 9 {
        return Err(CsnsError::Precondition(format!(
            "tensor divergence needs 9 components, got {}",
            t.ncomp()
        )));
    }
    let grid = t.grid().clone();
    let unit = grid.unit_wavenumber();
    let mut comps = vec![vec![ZERO; grid.len()]; 3];
    for lin in 0..grid.len() {
        if grid.is_nyquist(lin) {
            continue;
        }
        let k = grid.mode(lin);
        for i in 0..3 {
            let mut acc = ZERO;
            for j in 0..3 {
                acc += t.coeffs(3 * i + j)[lin] * Complex64::new(0.0, unit * k[j] as f64);
            }
            comps[i][lin] = acc;
        }
    }
    Ok(SpectralField::from_parts(&grid, comps, false))
}

fn forward_real(grid: &PeriodicGrid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::forward(grid, &mut data);
    strip_unrepresentable(grid, &mut data);
    data
}

/// Outer product `a_i b_j` computed pointwise, without dealiasing; the mean is dropped.
///
/// Exact when both factors have `|k_i| <= n/4`. Scalar times scalar gives one component.
pub fn outer_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_same_grid(b)?;
    let grid = a.grid().clone();
    let (pa, pb) = (a.to_physical(), b.to_physical());
    let mut comps = Vec::with_capacity(a.ncomp() * b.ncomp());
    for ai in pa.components() {
        for bj in pb.components() {
            let prod: Vec<f64> = ai.iter().zip(bj).map(|(x, y)| x * y).collect();
            comps.push(forward_real(&grid, &prod));
        }
    }
    Ok(SpectralField::from_parts(&grid, comps, false))
}

const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// `Q(a, b) = P div(a (x) b + b (x) a)`, dealiased.
///
/// For divergence-free inputs this equals `P((a.grad) b + (b.grad) a)`. The
/// symmetric tensor is formed entrywise as `a_j b_k + b_j a_k`, so swapping the
/// arguments reproduces the result bit for bit.
pub fn nonlinear_q(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_same_grid(b)?;
    require_vector(a, "Q")?;
    require_vector(b, "Q")?;
    let grid = a.grid().clone();
    if a.is_zero() || b.is_zero() {
        return Ok(SpectralField::from_parts(
            &grid,
            vec![vec![ZERO; grid.len()]; 3],
            true,
        ));
    }
    let (pa, pb) = (a.to_physical(), b.to_physical());
    Ok(q_from_physical(&grid, &pa, &pb))
}

fn q_from_physical(grid: &PeriodicGrid, pa: &PhysicalField, pb: &PhysicalField) -> SpectralField {
    let (ac, bc) = (pa.components(), pb.components());
    let mut sym: Vec<Vec<Complex64>> = Vec::with_capacity(6);
    for &(j, k) in &SYM_PAIRS {
        let t: Vec<f64> = (0..grid.len())
            .map(|x| ac[j][x] * bc[k][x] + bc[j][x] * ac[k][x])
            .collect();
        sym.push(forward_real(grid, &t));
    }
    let entry = |j: usize, k: usize| -> usize {
        let (a, b) = if j <= k { (j, k) } else { (k, j) };
        SYM_PAIRS.iter().position(|&p| p == (a, b)).unwrap()
    };
    let unit = grid.unit_wavenumber();
    let mask = grid.dealias_mask();
    let mut div = vec![vec![ZERO; grid.len()]; 3];
    for lin in 0..grid.len() {
        if !mask[lin] {
            continue;
        }
        let k = grid.mode(lin);
        for j in 0..3 {
            let mut acc = ZERO;
            for (m, &km) in k.iter().enumerate() {
                acc += sym[entry(j, m)][lin] * Complex64::new(0.0, unit * km as f64);
            }
            div[j][lin] = acc;
        }
    }
    let field = SpectralField::from_parts(grid, div, false);
    leray_project(&field).expect("three components")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::random_solenoidal;
    use std::f64::consts::PI;

    fn grid() -> PeriodicGrid {
        PeriodicGrid::new(16, 2.0 * PI).unwrap()
    }

    #[test]
    fn leray_kills_gradients() {
        let g = grid();
        let phi =
            SpectralField::from_fn(&g, 1, |x, o| o[0] = (x[0] + 2.0 * x[1]).sin() * x[2].cos());
        let grad = gradient(&phi).unwrap();
        assert!(grad.max_coefficient() > 0.1);
        assert!(leray_project(&grad).unwrap().max_coefficient() < 1e-15);
    }

    #[test]
    fn leray_fixes_solenoidal_fields_and_is_idempotent() {
        let u = random_solenoidal(&grid(), 7, 4, -1.0, 1.0);
        let once = leray_project(&u).unwrap();
        assert!(once.max_abs_diff(&u) <= 1e-14);
        let twice = leray_project(&once).unwrap();
        assert!(twice.max_abs_diff(&once) <= 1e-14);
        assert!(once.divergence_residual() <= 1e-12);
    }

    #[test]
    fn leray_of_longitudinal_mode_is_zero() {
        let g = grid();
        let one = Complex64::new(1.0, 0.0);
        let u = SpectralField::single_mode(&g, [1, 0, 0], &[one, ZERO, ZERO]).unwrap();
        assert!(leray_project(&u).unwrap().is_zero());
    }

    #[test]
    fn heat_decays_unit_mode_by_e() {
        let g = grid();
        let u = SpectralField::single_mode(&g, [0, 1, 0], &[Complex64::new(0.5, 0.0), ZERO, ZERO])
            .unwrap();
        let v = heat_semigroup(&u, 1.0).unwrap();
        let lin = g.mode_index([0, 1, 0]).unwrap();
        assert!((v.coeffs(0)[lin].re - 0.5 * (-1f64).exp()).abs() < 1e-16);
        assert!(heat_semigroup(&u, -1.0).is_err());
        assert!(heat_semigroup(&u, 0.0).unwrap().max_abs_diff(&u) == 0.0);
    }

    #[test]
    fn heat_commutes_with_leray_and_composes() {
        let g = grid();
        let u = random_solenoidal(&g, 3, 5, 0.0, 1.0);
        let raw = u
            .add(&gradient(&SpectralField::from_fn(&g, 1, |x, o| o[0] = x[0].sin())).unwrap())
            .unwrap();
        let a = leray_project(&heat_semigroup(&raw, 0.3).unwrap()).unwrap();
        let b = heat_semigroup(&leray_project(&raw).unwrap(), 0.3).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-14);
        let st = heat_semigroup(&heat_semigroup(&u, 0.2).unwrap(), 0.05).unwrap();
        let direct = heat_semigroup(&u, 0.25).unwrap();
        assert!(st.max_abs_diff(&direct) <= 1e-13 * u.max_coefficient());
    }

    #[test]
    fn inverse_laplacian_inverts_laplacian() {
        let g = grid();
        let u = random_solenoidal(&g, 11, 5, -1.0, 1.0);
        let back = laplacian(&inverse_laplacian(&u).unwrap());
        assert!(back.max_abs_diff(&u) <= 1e-13 * u.max_coefficient());
        let m = SpectralField::single_mode(&g, [2, 0, 0], &[ZERO, Complex64::new(1.0, 0.0), ZERO])
            .unwrap();
        let lin = g.mode_index([2, 0, 0]).unwrap();
        assert_eq!(inverse_laplacian(&m).unwrap().coeffs(1)[lin].re, -0.25);
        assert!(inverse_laplacian(&SpectralField::zeros(&g, 3))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn q_is_symmetric_bitwise_and_solenoidal() {
        let g = grid();
        let a = random_solenoidal(&g, 1, 4, -1.0, 1.0);
        let b = random_solenoidal(&g, 2, 4, -1.0, 1.0);
        let ab = nonlinear_q(&a, &b).unwrap();
        let ba = nonlinear_q(&b, &a).unwrap();
        assert_eq!(ab.max_abs_diff(&ba), 0.0);
        assert!(ab.is_divergence_free());
        assert!(ab.divergence_residual() <= 1e-12);
        assert!(nonlinear_q(&SpectralField::zeros(&g, 3), &b)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn q_matches_advective_form_for_solenoidal_inputs() {
        // Advective oracle: P((a.grad)b + (b.grad)a) from physical derivatives.
        let g = grid();
        let a = random_solenoidal(&g, 5, 3, 0.0, 1.0);
        let b = random_solenoidal(&g, 6, 3, 0.0, 1.0);
        let grad_of = |u: &SpectralField, c: usize| {
            gradient(&u.select_components(&[c])).unwrap().to_physical()
        };
        let (pa, pb) = (a.to_physical(), b.to_physical());
        let mut adv = vec![vec![0.0; g.len()]; 3];
        for c in 0..3 {
            let gb = grad_of(&b, c);
            let ga = grad_of(&a, c);
            for x in 0..g.len() {
                for d in 0..3 {
                    adv[c][x] += pa.components()[d][x] * gb.components()[d][x]
                        + pb.components()[d][x] * ga.components()[d][x];
                }
            }
        }
        let adv = SpectralField::from_physical(&PhysicalField::new(&g, adv).unwrap());
        let expect = leray_project(&dealias(&adv)).unwrap();
        let got = nonlinear_q(&a, &b).unwrap();
        assert!(got.max_abs_diff(&expect) <= 1e-13 * expect.max_coefficient().max(1.0));
    }

    #[test]
    fn q_of_crossed_single_modes_lives_on_sum_and_difference() {
        let g = grid();
        let one = Complex64::new(1.0, 0.0);
        let a = SpectralField::single_mode(&g, [1, 0, 0], &[ZERO, one, ZERO]).unwrap();
        let b = SpectralField::single_mode(&g, [0, 1, 0], &[ZERO, ZERO, one]).unwrap();
        let q = nonlinear_q(&a, &b).unwrap();
        let allowed: Vec<[i64; 3]> = vec![[1, 1, 0], [1, -1, 0], [-1, 1, 0], [-1, -1, 0]];
        let (mut inside, mut outside) = (0.0, 0.0);
        for lin in 0..g.len() {
            let e: f64 = (0..3).map(|c| q.coeffs(c)[lin].norm_sqr()).sum();
            if allowed.contains(&g.mode(lin)) {
                inside += e;
            } else {
                outside += e;
            }
        }
        assert!(
            inside > 0.1 && outside < 1e-28,
            "inside {inside} outside {outside}"
        );
    }
}
