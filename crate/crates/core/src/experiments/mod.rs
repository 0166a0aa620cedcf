//! End-to-end studies: the rescaled-data ladder, the decomposition of
//! forced solutions, and observables of long forced runs.

mod frames;
mod lambda_scan;
mod observables;
mod solutions;

pub use frames::{
    norm_scaling_identity_check, ns_rescale, ns_rescale_inverse_trajectory, ns_rescale_trajectory,
    rescaled_config, truncate_for_dilation,
};
pub use lambda_scan::{lambda_scan, GlobalRun, LambdaRung, LambdaScanConfig, LambdaScanResult};
pub use observables::{blowup_observables, blowup_observables_with_steady, ObservableReport};
pub use solutions::{
    decomposition_of_solutions, rescaled_lifespans, DecompositionOfSolutionsReport,
    ProfileRunSummary, SolutionsEntry, StageFailure,
};

/// Whether `values` decrease strictly except for at most one step.
pub fn decreasing_up_to_one(values: &[f64]) -> bool {
    values.windows(2).filter(|w| !(w[1] < w[0])).count() <= 1
}
