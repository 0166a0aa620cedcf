//! Mild-solution solvers built on the exact heat propagator.

mod config;
mod drift;
mod duhamel;
mod engine;
mod exponential;
mod ns;
pub mod persist;
mod perturbation;
mod solution;
mod split;
mod steady;

pub use config::{SolverConfig, Stepper};
pub use drift::drift_smallness_check;
pub use duhamel::duhamel_b;
pub use exponential::phi_functions;
pub use ns::{solve_ns, solve_nsf, solve_nsf_with_steady, DEFAULT_OBSERVABLE_P};
pub use perturbation::{solve_perturbation, PerturbationSolution, PerturbationTerms};
pub use solution::{ForcedObservables, LifespanFlag, MildSolution, StepDiagnostic};
pub use split::{piece_norm, split_intervals, SplitSchedule};
pub use steady::{
    solve_steady_state, solve_steady_state_with_report, steady_residual, steady_state_threshold,
    SteadyReport, SteadyThreshold,
};
