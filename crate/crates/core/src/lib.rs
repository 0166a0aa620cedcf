//! Numerical laboratory for critical-space analysis of the forced
//! incompressible Navier-Stokes equations on a periodic box.
//!
//! Layers, bottom-up: [`spectral`] field algebra, [`besov`] norms,
//! [`flows`] mild-solution solvers, [`profiles`] scaling and profile
//! decompositions, [`estimates`] inequality verification and
//! [`experiments`] end-to-end studies.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod besov;
pub mod error;
pub mod estimates;
pub mod experiments;
pub mod flows;
pub mod profiles;
pub mod spectral;

pub use error::{CsnsError, Result};
