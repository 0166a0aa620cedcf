//! Separable 3D FFT on row-major `n^3` arrays built from rustfft line plans.

use rustfft::num_complex::Complex64;
use rustfft::Fft;

use super::grid::PeriodicGrid;

/// Forward transform with `1/n^3` normalization: `u_hat(k) = n^-3 sum_x u(x) e^{-i xi.x}`.
pub fn forward(grid: &PeriodicGrid, data: &mut [Complex64]) {
    transform(grid, data, grid.forward_plan().as_ref());
    let scale = 1.0 / grid.len() as f64;
    for z in data.iter_mut() {
        *z *= scale;
    }
}

/// Unnormalized inverse transform: `u(x) = sum_k u_hat(k) e^{i xi.x}`.
pub fn inverse(grid: &PeriodicGrid, data: &mut [Complex64]) {
    transform(grid, data, grid.inverse_plan().as_ref());
}

fn transform(grid: &PeriodicGrid, data: &mut [Complex64], plan: &dyn Fft<f64>) {
    let n = grid.n();
    debug_assert_eq!(data.len(), n * n * n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];

    // Last axis: contiguous lines.
    plan.process_with_scratch(data, &mut scratch);

    // Middle axis: transpose each plane so lines become contiguous.
    let mut plane = vec![Complex64::new(0.0, 0.0); n * n];
    for p in data.chunks_exact_mut(n * n) {
        transpose(p, &mut plane, n, n);
        plan.process_with_scratch(&mut plane, &mut scratch);
        transpose(&plane, p, n, n);
    }

    // First axis: view as an n x n^2 matrix.
    let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
    transpose(data, &mut buf, n, n * n);
    plan.process_with_scratch(&mut buf, &mut scratch);
    transpose(&buf, data, n * n, n);
}

/// `dst[c][r] = src[r][c]` for a `rows x cols` row-major matrix.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const TILE: usize = 16;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
