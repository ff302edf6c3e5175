//! The convergence certificate and the derived constants.
//!
//! A certificate bundles everything needed to guarantee geometric
//! convergence of fixed-step descent inside a ball:
//!
//! * the ball `B(x0, r)` and the starting value `f(x0)`,
//! * `alpha`, a positive lower bound on `|grad f|^2 / f` over the ball,
//! * `epsilon` in (0,1) chosen so `4 f(x0) < (1-epsilon)^2 r^2 alpha`,
//! * derivative bounds `L1` (first partials on the ball) and `L2`
//!   (second partials on the doubled ball),
//! * the step size `eta <= min(r / (L1 sqrt(p)), 2 epsilon / (L2 p))`,
//! * the contraction `delta = min(1, (1-epsilon) alpha eta)` appearing in
//!   the per-step bound `f(x_k) <= (1-delta)^k f(x0)`.

use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::{norm, Ball};
use crate::math;
use crate::objective::Objective;
use crate::oracle::ZERO_LOSS_TOL;
use crate::rng::{derive_seed, sample_in_ball, SplitMix64};

/// How an `alpha` value was obtained. Only analytic values are true lower
/// bounds; sampling an infimum over-estimates it, so sampled certificates
/// are advisory rather than proved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaKind {
    Analytic,
    Sampled,
    GridOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaEstimate {
    /// Positive, possibly `f64::INFINITY` when the objective vanished at
    /// every probed point.
    pub value: f64,
    pub kind: AlphaKind,
    pub sample_count: usize,
}

impl AlphaEstimate {
    pub fn analytic(value: f64) -> Result<Self> {
        if !(value > 0.0) {
            return Err(Error::Input(format!("alpha must be positive, got {value}")));
        }
        Ok(AlphaEstimate {
            value,
            kind: AlphaKind::Analytic,
            sample_count: 0,
        })
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

/// Provenance of the first/second derivative bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzBounds {
    pub l1: f64,
    pub l2: f64,
    pub mode: BoundMode,
}

impl LipschitzBounds {
    pub fn analytic(l1: f64, l2: f64) -> Self {
        LipschitzBounds {
            l1,
            l2,
            mode: BoundMode::Analytic,
        }
    }
}

/// Overall trust level of a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Analytic alpha and analytic derivative bounds.
    Proved,
    /// Analytic alpha, sampled derivative bounds.
    HeuristicLipschitz,
    /// Alpha itself was sampled; the criterion check is optimistic.
    SampledAlpha,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::Proved => "proved",
            Provenance::HeuristicLipschitz => "heuristic-L",
            Provenance::SampledAlpha => "sampled-alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub ball: Ball,
    pub f_x0: f64,
    pub alpha: AlphaEstimate,
    pub epsilon: f64,
    pub l1: f64,
    pub l2: f64,
    pub lipschitz_mode: BoundMode,
    pub eta: f64,
    pub delta: f64,
}

impl Certificate {
    pub fn provenance(&self) -> Provenance {
        if self.alpha.kind != AlphaKind::Analytic {
            Provenance::SampledAlpha
        } else if self.lipschitz_mode == BoundMode::Sampled {
            Provenance::HeuristicLipschitz
        } else {
            Provenance::Proved
        }
    }
}

/// Estimate `inf |grad f|^2 / f` over the ball from uniform samples,
/// skipping points where `f` vanishes. This is an upper estimate of the
/// true infimum: the result is labeled [`AlphaKind::Sampled`] and never
/// yields a proved certificate. Returns the infinity sentinel when `f`
/// vanished at every sample.
pub fn alpha_sampled(
    f: &dyn Objective,
    ball: &Ball,
    n_samples: usize,
    seed: u64,
) -> Result<AlphaEstimate> {
    if n_samples == 0 {
        return Err(Error::Input("alpha sampling needs at least one sample".into()));
    }
    if f.dim() != ball.dim() {
        return Err(Error::Input(format!(
            "dimension mismatch: objective has dimension {}, ball has {}",
            f.dim(),
            ball.dim()
        )));
    }
    let mut rng = SplitMix64::new(derive_seed(seed, "alpha-sampled"));
    let mut best = f64::INFINITY;
    let mut grad = alloc::vec![0.0; f.dim()];
    for _ in 0..n_samples {
        let x = sample_in_ball(&mut rng, ball);
        let value = f.value(&x);
        if value < 0.0 {
            return Err(Error::Input(format!(
                "objective returned a negative value {value}; it must be nonnegative"
            )));
        }
        if value <= ZERO_LOSS_TOL {
            continue;
        }
        f.gradient_into(&x, &mut grad);
        let g = norm(&grad);
        best = best.min(g * g / value);
    }
    Ok(AlphaEstimate {
        value: best,
        kind: AlphaKind::Sampled,
        sample_count: n_samples,
    })
}

/// The strict ball criterion `4 f(x0) < r^2 alpha`. Returns whether it
/// holds and the slack `r^2 alpha - 4 f(x0)`.
pub fn check_criterion(f_x0: f64, r: f64, alpha: &AlphaEstimate) -> (bool, f64) {
    if alpha.is_infinite() {
        return (f_x0.is_finite(), f64::INFINITY);
    }
    let slack = r * r * alpha.value - 4.0 * f_x0;
    (4.0 * f_x0 < r * r * alpha.value, slack)
}

const EPSILON_CLAMP: f64 = 1e-6;

/// Pick `epsilon` as the midpoint of its feasible interval: with
/// `rho = 2 sqrt(f(x0)/alpha) / r < 1`, any `epsilon < 1 - rho` works, and
/// the midpoint `(1 - rho)/2` balances the contraction rate (which wants
/// `epsilon` small) against the step-size cap (which wants it large).
/// The result is clamped into `[1e-6, 1 - 1e-6]`.
pub fn choose_epsilon(f_x0: f64, r: f64, alpha: f64) -> Result<f64> {
    if !(r > 0.0) || !(alpha > 0.0) || f_x0 < 0.0 {
        return Err(Error::Input(format!(
            "choose_epsilon needs r > 0, alpha > 0, f_x0 >= 0; got r={r}, alpha={alpha}, f_x0={f_x0}"
        )));
    }
    let rho = if alpha == f64::INFINITY {
        0.0
    } else {
        2.0 * math::sqrt(f_x0 / alpha) / r
    };
    if rho >= 1.0 {
        return Err(Error::CriterionFailed {
            slack: r * r * alpha - 4.0 * f_x0,
        });
    }
    Ok(((1.0 - rho) / 2.0).clamp(EPSILON_CLAMP, 1.0 - EPSILON_CLAMP))
}

/// Step-size cap: exactly `min(r / (L1 sqrt(p)), 2 epsilon / (L2 p))`.
pub fn choose_step_size(r: f64, p: usize, l1: f64, l2: f64, epsilon: f64) -> f64 {
    let p = p as f64;
    (r / (l1 * math::sqrt(p))).min(2.0 * epsilon / (l2 * p))
}

/// Assemble a certificate, checking the criterion and deriving `epsilon`,
/// `eta`, and `delta`. `epsilon_override` replaces the midpoint rule when
/// provided; it must still satisfy the strict inequality.
pub fn build_certificate_with_epsilon(
    f: &dyn Objective,
    ball: &Ball,
    alpha: AlphaEstimate,
    lipschitz: LipschitzBounds,
    epsilon_override: Option<f64>,
) -> Result<Certificate> {
    if f.dim() != ball.dim() {
        return Err(Error::Input(format!(
            "dimension mismatch: objective has dimension {}, ball has {}",
            f.dim(),
            ball.dim()
        )));
    }
    if !(alpha.value > 0.0) {
        return Err(Error::Input(format!("alpha must be positive, got {}", alpha.value)));
    }
    if !(lipschitz.l1 > 0.0 && lipschitz.l2 > 0.0) {
        return Err(Error::Input(format!(
            "derivative bounds must be positive, got L1={}, L2={}",
            lipschitz.l1, lipschitz.l2
        )));
    }
    let f_x0 = f.value(ball.center());
    if !f_x0.is_finite() || f_x0 < 0.0 {
        return Err(Error::Input(format!("f(x0) must be finite and nonnegative, got {f_x0}")));
    }
    let r = ball.radius();
    let (holds, slack) = check_criterion(f_x0, r, &alpha);
    if !holds {
        return Err(Error::CriterionFailed { slack });
    }
    let epsilon = match epsilon_override {
        Some(e) => {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Input(format!("epsilon must lie in (0,1), got {e}")));
            }
            e
        }
        None => choose_epsilon(f_x0, r, alpha.value)?,
    };
    // The clamp in choose_epsilon can break the strengthened inequality when
    // the criterion holds by less than ~4e-6 relative; refuse to certify
    // that sliver rather than emit an invalid certificate.
    if !alpha.is_infinite() && !(4.0 * f_x0 < (1.0 - epsilon) * (1.0 - epsilon) * r * r * alpha.value)
    {
        return Err(Error::Input(format!(
            "epsilon {epsilon} violates 4 f(x0) < (1-epsilon)^2 r^2 alpha"
        )));
    }
    let eta = choose_step_size(r, f.dim(), lipschitz.l1, lipschitz.l2, epsilon);
    let delta = (1.0f64).min((1.0 - epsilon) * alpha.value * eta);
    Ok(Certificate {
        ball: ball.clone(),
        f_x0,
        alpha,
        epsilon,
        l1: lipschitz.l1,
        l2: lipschitz.l2,
        lipschitz_mode: lipschitz.mode,
        eta,
        delta,
    })
}

/// [`build_certificate_with_epsilon`] with the default midpoint rule.
pub fn build_certificate(
    f: &dyn Objective,
    ball: &Ball,
    alpha: AlphaEstimate,
    lipschitz: LipschitzBounds,
) -> Result<Certificate> {
    build_certificate_with_epsilon(f, ball, alpha, lipschitz, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{ExpObjective, Quadratic};
    use crate::oracle::grid_alpha;
    use alloc::vec;

    #[test]
    fn sampled_alpha_constant_ratio_is_four() {
        let q = Quadratic::isotropic(2);
        let ball = Ball::new(vec![2.0, 0.0], 1.0).unwrap();
        let a = alpha_sampled(&q, &ball, 200, 1).unwrap();
        assert!((a.value - 4.0).abs() < 1e-12, "got {}", a.value);
        assert_eq!(a.kind, AlphaKind::Sampled);
        assert_eq!(a.sample_count, 200);
    }

    #[test]
    fn sampled_alpha_zero_function_is_sentinel() {
        struct Zero;
        impl Objective for Zero {
            fn dim(&self) -> usize {
                2
            }
            fn value(&self, _x: &[f64]) -> f64 {
                0.0
            }
            fn gradient_into(&self, _x: &[f64], g: &mut [f64]) {
                g.fill(0.0);
            }
        }
        let ball = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        let a = alpha_sampled(&Zero, &ball, 50, 9).unwrap();
        assert_eq!(a.value, f64::INFINITY);
    }

    #[test]
    fn sampled_alpha_never_undershoots_grid_oracle_on_exp() {
        // Sampling an infimum over-estimates it; the dense grid gets closer
        // to the true value e^{x0 - r} from above as well.
        let f = ExpObjective;
        let ball = Ball::new(vec![0.3], 0.7).unwrap();
        let sampled = alpha_sampled(&f, &ball, 500, 11).unwrap();
        let grid = grid_alpha(&f, &ball, 20_001).unwrap();
        assert!(sampled.value >= grid - 1e-12, "sampled {} < grid {}", sampled.value, grid);
        assert!(grid >= math::exp(0.3 - 0.7) - 1e-9);
    }

    #[test]
    fn criterion_examples() {
        let alpha = AlphaEstimate::analytic(4.0).unwrap();
        let (holds, slack) = check_criterion(1.0, 2.0, &alpha);
        assert!(holds);
        assert_eq!(slack, 12.0);

        // boundary case: the inequality is strict
        let (holds, slack) = check_criterion(1.0, 1.0, &alpha);
        assert!(!holds);
        assert_eq!(slack, 0.0);

        let (holds, _) = check_criterion(0.0, 0.5, &alpha);
        assert!(holds);
    }

    #[test]
    fn criterion_with_infinite_alpha() {
        let alpha = AlphaEstimate {
            value: f64::INFINITY,
            kind: AlphaKind::Sampled,
            sample_count: 10,
        };
        let (holds, slack) = check_criterion(3.0, 0.1, &alpha);
        assert!(holds);
        assert_eq!(slack, f64::INFINITY);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(choose_epsilon(0.0, 1.0, 4.0).unwrap(), 0.5);

        // rho = 2 sqrt(1/4)/2 = 0.5, epsilon = 0.25, and the strengthened
        // inequality (0.75)^2 * 4 * 4 = 9 > 4 holds.
        let e = choose_epsilon(1.0, 2.0, 4.0).unwrap();
        assert_eq!(e, 0.25);
        assert!(4.0 * 1.0 < (1.0 - e) * (1.0 - e) * 4.0 * 4.0);

        // near-critical f(x0) clamps at the floor instead of reaching 0
        let f_x0 = 4.0 * (1.0 - 1e-12); // just under r^2 alpha / 4 = 4
        let e = choose_epsilon(f_x0, 2.0, 4.0).unwrap();
        assert_eq!(e, EPSILON_CLAMP);

        assert!(matches!(
            choose_epsilon(100.0, 1.0, 4.0),
            Err(Error::CriterionFailed { .. })
        ));
    }

    #[test]
    fn step_size_examples() {
        assert_eq!(choose_step_size(1.0, 1, 2.0, 2.0, 0.5), 0.5);
        assert_eq!(choose_step_size(1.0, 4, 1.0, 1.0, 0.25), 0.125);
        // monotone vanishing in L1
        assert!(choose_step_size(1.0, 1, 1e9, 1.0, 0.5) < 1e-8);
    }

    #[test]
    fn build_certificate_quadratic_hand_values() {
        // |x|^2 in one dimension, x0 = 0.5, r = 1: |2x| <= 3 on [-0.5, 1.5],
        // Hessian entry 2 everywhere.
        let q = Quadratic::isotropic(1);
        let ball = Ball::new(vec![0.5], 1.0).unwrap();
        let cert = build_certificate(
            &q,
            &ball,
            AlphaEstimate::analytic(4.0).unwrap(),
            LipschitzBounds::analytic(3.0, 2.0),
        )
        .unwrap();
        assert_eq!(cert.f_x0, 0.25);
        assert_eq!(cert.epsilon, 0.25); // rho = 2 sqrt(0.25/4) = 0.5
        assert_eq!(cert.eta, 0.25); // min(1/3, 2*0.25/2) = 0.25
        assert_eq!(cert.delta, 0.75); // (1 - 0.25) * 4 * 0.25
        assert_eq!(cert.provenance(), Provenance::Proved);
    }

    #[test]
    fn build_certificate_zero_start() {
        let q = Quadratic::isotropic(1);
        let ball = Ball::new(vec![0.0], 1.0).unwrap();
        let cert = build_certificate(
            &q,
            &ball,
            AlphaEstimate::analytic(4.0).unwrap(),
            LipschitzBounds::analytic(2.0, 2.0),
        )
        .unwrap();
        assert_eq!(cert.f_x0, 0.0);
        assert_eq!(cert.epsilon, 0.5);
        assert_eq!(cert.delta, 1.0f64.min(0.5 * 4.0 * cert.eta));
    }

    #[test]
    fn build_certificate_rejects_failing_criterion() {
        let q = Quadratic::isotropic(1);
        let ball = Ball::new(vec![10.0], 1.0).unwrap(); // 4*100 > 1*4
        let err = build_certificate(
            &q,
            &ball,
            AlphaEstimate::analytic(4.0).unwrap(),
            LipschitzBounds::analytic(22.0, 2.0),
        )
        .unwrap_err();
        match err {
            Error::CriterionFailed { slack } => assert!(slack < 0.0),
            other => panic!("expected CriterionFailed, got {other:?}"),
        }
    }

    #[test]
    fn provenance_reflects_inputs() {
        let q = Quadratic::isotropic(1);
        let ball = Ball::new(vec![0.5], 1.0).unwrap();
        let sampled_alpha = alpha_sampled(&q, &ball, 64, 5).unwrap();
        let cert = build_certificate(
            &q,
            &ball,
            sampled_alpha,
            LipschitzBounds::analytic(3.0, 2.0),
        )
        .unwrap();
        assert_eq!(cert.provenance(), Provenance::SampledAlpha);

        let cert = build_certificate(
            &q,
            &ball,
            AlphaEstimate::analytic(4.0).unwrap(),
            LipschitzBounds {
                l1: 3.0,
                l2: 2.0,
                mode: BoundMode::Sampled,
            },
        )
        .unwrap();
        assert_eq!(cert.provenance(), Provenance::HeuristicLipschitz);
    }
}
