//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: non-finite entries, dimension mismatches, parameters
    /// outside their documented ranges.
    Input(String),
    /// The strict ball criterion `4 f(x0) < r^2 alpha` does not hold. Carries
    /// the measured slack `r^2 alpha - 4 f(x0)` (non-positive here).
    CriterionFailed { slack: f64 },
    /// Iteration produced a non-finite value. `steps_completed` counts the
    /// steps that were recorded before the blow-up.
    Divergence { steps_completed: usize },
    /// The data Gram matrix is (numerically) singular, so no certificate can
    /// be built. Requires `d >= n` and linearly independent inputs.
    DataDegeneracy { alpha_data: f64 },
    /// The output-scale search hit its cap without satisfying the criterion.
    SearchFailed { scale_reached: f64 },
    /// Operation not available for these inputs.
    Unsupported(String),
    /// An activation produced a slope bound that violates its contract.
    ActivationContract(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "invalid input: {msg}"),
            Error::CriterionFailed { slack } => write!(
                f,
                "convergence criterion 4 f(x0) < r^2 alpha failed (slack {slack:e})"
            ),
            Error::Divergence { steps_completed } => write!(
                f,
                "non-finite value encountered after {steps_completed} completed steps"
            ),
            Error::DataDegeneracy { alpha_data } => write!(
                f,
                "inputs are not linearly independent (min eigenvalue of the data Gram matrix is {alpha_data:e}); the criterion requires d >= n and independence"
            ),
            Error::SearchFailed { scale_reached } => write!(
                f,
                "output-scale search exceeded its cap (reached {scale_reached:e})"
            ),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::ActivationContract(msg) => write!(f, "activation contract violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
