//! Bound-verification reports.

use alloc::vec::Vec;

use crate::trace::MonitorVerdict;

/// Verdicts for one completed step (the transition from iterate `j` to
/// `j+1`). `ball_ok` and `rate_ok` refer to the arrival point; `residual`
/// is the measured Taylor remainder `R_j` of the transition.
#[derive(Debug, Clone, PartialEq)]
pub struct StepBounds {
    pub ball_ok: bool,
    pub rate_ok: bool,
    pub residual_ok: bool,
    pub residual: f64,
}

/// Per-step verdicts plus one summary verdict per check. Verification
/// reports; it never fails just because a bound was violated.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub steps: Vec<StepBounds>,
    pub summary: Vec<MonitorVerdict>,
}

impl BoundReport {
    pub fn all_passed(&self) -> bool {
        self.summary.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&MonitorVerdict> {
        self.summary.iter().find(|v| v.name == name)
    }
}
