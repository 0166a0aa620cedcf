use serde::{Deserialize, Serialize};

use crate::error::{CsnsError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    /// Fixed-point iteration of the Duhamel formula on each step window,
    /// with exponential collocation on the nodes `{0, 1/2, 1}`.
    PicardDuhamel,
    /// Classical RK4 on the integrating-factor form `v = e^{-t Delta} u`.
    IntegratingFactorRk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub stepper: Stepper,
    /// Keep every `snapshot_stride`-th step (and always the last one).
    pub snapshot_stride: usize,
    /// Stop with a blow-up flag once `||u||_{L^inf}` exceeds this value.
    pub linf_guard: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 0.1,
            picard_tol: 1e-10,
            picard_max_iter: 50,
            stepper: Stepper::PicardDuhamel,
            snapshot_stride: 1,
            linf_guard: 1e6,
        }
    }
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64, stepper: Stepper) -> Self {
        Self {
            dt,
            t_end,
            stepper,
            ..Self::default()
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            bad.push(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if !(self.picard_tol > 0.0) {
            bad.push(format!(
                "picard_tol must be positive, got {}",
                self.picard_tol
            ));
        }
        if self.picard_max_iter == 0 {
            bad.push("picard_max_iter must be at least 1".into());
        }
        if self.snapshot_stride == 0 {
            bad.push("snapshot_stride must be at least 1".into());
        }
        if !(self.linf_guard > 0.0) {
            bad.push(format!(
                "linf_guard must be positive, got {}",
                self.linf_guard
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(CsnsError::Precondition(bad.join("; ")))
        }
    }

    /// Number of uniform steps; the step is shrunk so the horizon is hit exactly.
    pub fn step_count(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        ((self.t_end / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        match self.step_count() {
            0 => self.dt,
            n => self.t_end / n as f64,
        }
    }
}
