//! Periodic pseudo-spectral field algebra on `[0, L)^3`.

pub mod fft;
mod field;
mod force;
mod grid;
mod ops;
pub mod random;
pub mod rescale;
pub mod snapshot;

pub use field::{PhysicalField, SpectralField};
pub use force::ForceSpec;
pub use grid::{admissible_points, make_grid, PeriodicGrid, DEFAULT_DEALIAS_FRACTION};
pub use ops::{
    dealias, divergence_of_tensor, gradient, heat_semigroup, inverse_laplacian, laplacian,
    leray_project, nonlinear_q, outer_product,
};
pub use rescale::scale_l3_invariant_rescale;
pub use rustfft::num_complex::Complex64;
