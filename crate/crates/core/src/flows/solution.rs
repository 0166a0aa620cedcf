use serde::{Deserialize, Serialize};

use crate::besov::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifespanFlag {
    Completed,
    NormBlowup,
    IterationFailure,
}

/// Per-step record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepDiagnostic {
    pub t: f64,
    pub l3: f64,
    pub linf: f64,
    /// Relative size of the last fixed-point increment (0 for the RK4 stepper).
    pub residual: f64,
    pub picard_iterations: usize,
    /// `max|u| dt / h`.
    pub cfl: f64,
}

/// Observables of a forced run measured against the steady state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcedObservables {
    /// `sup_t ||u_f(t)||_{L^3}` over the snapshots.
    pub sup_l3: f64,
    /// Integrability `p` used for the mixed norm.
    pub p: f64,
    /// `||u_f - U_f||_{L^{p:inf}_p}` over the run.
    pub distance_to_steady: f64,
}

#[derive(Clone, Debug)]
pub struct MildSolution {
    pub trajectory: Trajectory,
    pub lifespan_flag: LifespanFlag,
    pub final_time: f64,
    pub diagnostics: Vec<StepDiagnostic>,
    pub forced: Option<ForcedObservables>,
}

impl MildSolution {
    pub fn completed(&self) -> bool {
        self.lifespan_flag == LifespanFlag::Completed
    }

    /// Diagnostics as CSV with header `t,l3,linf,residual,picard_iterations,cfl`.
    pub fn diagnostics_csv(&self) -> String {
        let mut s = String::from("t,l3,linf,residual,picard_iterations,cfl\n");
        for d in &self.diagnostics {
            s.push_str(&format!(
                "{:?},{:?},{:?},{:?},{},{:?}\n",
                d.t, d.l3, d.linf, d.residual, d.picard_iterations, d.cfl
            ));
        }
        s
    }
}
