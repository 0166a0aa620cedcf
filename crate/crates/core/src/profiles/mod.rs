//! Scaling operators, scale-core orthogonality, profile synthesis and
//! extraction, and orthogonality-of-products measurements.

mod extract;
pub mod families;
mod lambda;
mod products;
mod scale_core;
mod set;

pub use extract::{
    extract_profiles, locate_concentration, Concentration, DecompositionReport, ExtractionConfig,
    PairOrthogonality, PlantedComparison, StopReason,
};
pub use lambda::{
    apply_lambda, apply_lambda_inverse, apply_lambda_inverse_projecting,
    apply_lambda_inverse_trajectory, apply_lambda_trajectory,
};
pub use products::{
    geometric_decay_exponent, product_orthogonality_decay, ProductPair, ProductParams,
};
pub use scale_core::{core_distance, orthogonality_value, ScaleCore};
pub use set::{pythagorean_defect, read_profile_set, synthesize, write_profile_set, ProfileSet};
