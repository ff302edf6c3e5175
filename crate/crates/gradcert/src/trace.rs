//! Per-step records produced by descent runs and flow integrations.

use alloc::string::String;
use alloc::vec::Vec;

use crate::flow::FlowMethod;

/// What produced a trace. Bound verification needs to know the step size
/// (descent) or the integration step (flow) that generated it.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceKind {
    Descent { eta: f64 },
    Flow { step: f64, method: FlowMethod },
}

/// Inline monitor verdicts for one recorded step. Present only when the run
/// had a certificate attached.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMonitor {
    /// The certified bound on `f` at this step: `(1-delta)^k f(x0)` for
    /// descent, `e^{-alpha t} f(x0)` for flow (before tolerance factors).
    pub rate_bound: f64,
    pub ball_ok: bool,
    pub rate_ok: bool,
    /// Descent only: verdict for the Taylor-residual bound of the transition
    /// that produced this iterate. `None` for flow rows and the initial row.
    pub residual_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Iteration index (descent, stored as a float) or time (flow).
    pub time: f64,
    pub f: f64,
    pub grad_norm: f64,
    pub dist_from_start: f64,
    pub monitor: Option<StepMonitor>,
}

/// A named check with the worst slack measured across the run. Positive
/// slack means the bound held with room to spare; negative means it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorVerdict {
    pub name: String,
    pub passed: bool,
    pub worst_slack: f64,
}

/// Record of a full run. Scalar statistics are kept for every step; full
/// iterates are sampled at the configured stride (always including the first
/// and last step) to keep long runs affordable.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub kind: TraceKind,
    pub steps: Vec<TraceStep>,
    /// `(step index, iterate)` pairs at the sampling stride.
    pub points: Vec<(usize, Vec<f64>)>,
    /// Summary verdicts, one per monitor, when a certificate was attached.
    pub verdicts: Vec<MonitorVerdict>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_f(&self) -> f64 {
        self.steps.last().map(|s| s.f).unwrap_or(f64::NAN)
    }

    pub fn final_point(&self) -> Option<&[f64]> {
        self.points.last().map(|(_, x)| x.as_slice())
    }

    /// `Some(true)` if monitors ran and all passed, `Some(false)` if any
    /// failed, `None` if the run had no certificate attached.
    pub fn all_monitors_passed(&self) -> Option<bool> {
        if self.verdicts.is_empty() {
            None
        } else {
            Some(self.verdicts.iter().all(|v| v.passed))
        }
    }
}
