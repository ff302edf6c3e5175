//! Ball-local convergence certificates for gradient descent and gradient flow.
//!
//! The central object is a [`Certificate`]: a ball `B(x0, r)` together with a
//! positive lower bound `alpha` on the ratio `|grad f|^2 / f` over that ball,
//! a slack parameter `epsilon`, derivative bounds `L1`/`L2`, a step size
//! `eta`, and a per-step contraction factor `delta`. Whenever the strict
//! inequality `4 f(x0) < r^2 alpha` holds, fixed-step gradient descent started
//! at `x0` stays inside the ball and drives `f` to zero geometrically, and the
//! continuous-time flow does the same with rate `exp(-alpha t)`. The crate
//! computes these certificates, runs the descent and the flow with inline
//! bound monitors, and applies the machinery to train small feedforward
//! networks to exactly zero squared loss from a constructive initialization.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only toggles `std`-dependent conveniences in downstream crates.
//! All transcendental math is routed through `libm` so results are
//! bit-identical across platforms.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod certificate;
pub mod descent;
pub mod error;
pub mod flow;
pub mod init;
pub mod linalg;
pub mod math;
pub mod nn;
pub mod objective;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod stats;
pub mod trace;

pub use certificate::{
    alpha_sampled, build_certificate, check_criterion, choose_epsilon, choose_step_size,
    AlphaEstimate, AlphaKind, BoundMode, Certificate, LipschitzBounds, Provenance,
};
pub use descent::{check_descent_residual, run_descent, verify_rate_bounds, DescentConfig};
pub use error::{Error, Result};
pub use flow::{compare_flow_descent, integrate_flow, verify_flow_bounds, FlowConfig, FlowMethod};
pub use linalg::{Ball, Matrix};
pub use objective::{ExpObjective, Objective, Quadratic};
pub use report::{BoundReport, StepBounds};
pub use trace::{MonitorVerdict, StepMonitor, Trace, TraceKind, TraceStep};
