//! Numerical checks of product laws, heat smoothing and the perturbation bootstrap.
//!
//! A check never proves an inequality; it reports the largest observed ratio
//! over a corpus and how much that ratio moves across resolutions.

mod bootstrap;
mod corpus;
mod exponents;
mod product_laws;
mod report;
mod smoothing;
mod sweep;

pub use bootstrap::{
    forcing_space_norm_on, log_bound_slope, measure_k, verify_perturbation_bound, KMeasurement,
    PerturbationBound, PerturbationProbe,
};
pub use corpus::{CorpusPair, CorpusSpec, MIN_CORPUS};
pub use exponents::{
    critical_regularity_exact, product_law_4_exponents, ProductLaw4Exponents, Rational,
};
pub use product_laws::{
    product_trajectory, verify_product_law_1, verify_product_law_2, verify_product_law_3,
    verify_product_law_4, Law1, Law2, Law3, Law4,
};
pub use report::{aggregate_csv, EstimateReport};
pub use smoothing::{
    duhamel_trajectory, heat_block_ratio, verify_duhamel_smoothing, verify_heat_block_decay,
    DuhamelSmoothing,
};
