//! Initialization schemes and the Monte Carlo success-probability estimate.

use alloc::format;
use alloc::vec::Vec;

use crate::descent::{run_descent, DescentConfig};
use crate::error::{Error, Result};
use crate::math;
use crate::nn::{Dataset, NetworkArchitecture, NetworkObjective, NetworkParams};
use crate::rng::{derive_seed, SplitMix64};
use crate::stats::clopper_pearson;

/// The structured deterministic initialization: first weight matrix and all
/// biases zero, middle weight entries uniform in `[delta, k_max]`, output
/// weights all exactly `a_scale` (the smallest compliant choice, which keeps
/// the derivative bounds small). The network output is identically zero at
/// this point, so the loss equals the mean squared target regardless of the
/// drawn middle weights.
pub fn theorem3_init(
    arch: &NetworkArchitecture,
    delta: f64,
    k_max: f64,
    a_scale: f64,
    seed: u64,
) -> Result<NetworkParams> {
    if !(delta > 0.0) || !(k_max >= delta) {
        return Err(Error::Input(format!(
            "need 0 < delta <= k_max, got delta={delta} k_max={k_max}"
        )));
    }
    if !(a_scale >= delta) {
        return Err(Error::Input(format!(
            "output scale must be at least delta, got {a_scale}"
        )));
    }
    let depth = arch.depth();
    let mut params = NetworkParams::zeros(arch);
    let mut rng = SplitMix64::new(derive_seed(seed, "theorem3-init"));
    for layer in 1..depth - 1 {
        for w in params.weights_mut(arch, layer) {
            *w = rng.next_in_range(delta, k_max);
        }
    }
    for w in params.weights_mut(arch, depth - 1) {
        *w = a_scale;
    }
    Ok(params)
}

/// Gaussian fan-in initialization: biases zero, entries of each weight
/// matrix i.i.d. normal with mean zero and variance `c / fan_in`.
pub fn lecun_init(arch: &NetworkArchitecture, c: f64, seed: u64) -> Result<NetworkParams> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Input(format!("variance scale must be positive, got {c}")));
    }
    let mut params = NetworkParams::zeros(arch);
    let mut rng = SplitMix64::new(derive_seed(seed, "lecun-init"));
    for layer in 0..arch.depth() {
        let sd = math::sqrt(c / arch.fan_in(layer) as f64);
        for w in params.weights_mut(arch, layer) {
            *w = sd * rng.next_gaussian();
        }
    }
    Ok(params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub final_loss: f64,
    pub iterations: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEstimate {
    pub theta_hat: f64,
    /// 95% Clopper-Pearson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub outcomes: Vec<TrialOutcome>,
}

/// Estimate the probability that descent from a random Gaussian
/// initialization reaches `loss < tol` within the step budget. Each trial
/// draws its own seed from the master seed; a diverging trial counts as a
/// failure, not an error.
pub fn estimate_theta(
    arch: &NetworkArchitecture,
    data: &Dataset,
    c: f64,
    trials: usize,
    eta: f64,
    budget: usize,
    tol: f64,
    seed: u64,
) -> Result<ThetaEstimate> {
    if trials == 0 {
        return Err(Error::Input("need at least one trial".into()));
    }
    let objective = NetworkObjective::new(arch.clone(), data.clone())?;
    let mut outcomes = Vec::with_capacity(trials);
    let mut successes = 0usize;
    for trial in 0..trials {
        let trial_seed = derive_seed(seed, &format!("lecun-trial-{trial}"));
        let params = lecun_init(arch, c, trial_seed)?;
        let cfg = DescentConfig {
            stop_f_tol: Some(tol),
            point_stride: usize::MAX,
            ..DescentConfig::new(eta, budget)
        };
        let (final_loss, iterations) = match run_descent(&objective, params.flat(), &cfg) {
            Ok(trace) => (trace.final_f(), trace.len() - 1),
            Err(Error::Divergence { steps_completed }) => (f64::INFINITY, steps_completed),
            Err(other) => return Err(other),
        };
        let success = final_loss < tol;
        successes += success as usize;
        outcomes.push(TrialOutcome {
            trial,
            seed: trial_seed,
            final_loss,
            iterations,
            success,
        });
    }
    let (ci_low, ci_high) = clopper_pearson(successes, trials, 0.95)?;
    Ok(ThetaEstimate {
        theta_hat: successes as f64 / trials as f64,
        ci_low,
        ci_high,
        outcomes,
    })
}
