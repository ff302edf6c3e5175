//! Fixed-step gradient descent with inline bound monitors.
//!
//! The update is exactly `x_{k+1} = x_k - eta * grad f(x_k)`. When a
//! certificate is attached, every step is checked against the three
//! quantitative guarantees it encodes:
//!
//! * containment: `x_k` stays in the certificate ball,
//! * rate: `f(x_k) <= (1-delta)^k f(x0)`,
//! * residual: the Taylor remainder `R_j = f(x_{j+1}) - f(x_j) +
//!   eta |grad f(x_j)|^2` satisfies `|R_j| <= epsilon eta |grad f(x_j)|^2`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dist, ensure_finite, norm};
use crate::math;
use crate::objective::Objective;
use crate::report::{BoundReport, StepBounds};
use crate::trace::{MonitorVerdict, StepMonitor, Trace, TraceKind, TraceStep};

/// Relative tolerance for ball containment checks.
const BALL_TOL: f64 = 1e-12;
/// Relative tolerance for rate and residual comparisons.
const RATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DescentConfig {
    pub eta: f64,
    /// Maximum number of update steps (the trace holds up to `max_iter + 1`
    /// rows including the starting point).
    pub max_iter: usize,
    /// Stop once `f <= stop_f_tol`; `None` means `1e-10 * max(1, f(x0))`.
    pub stop_f_tol: Option<f64>,
    pub certificate: Option<Certificate>,
    /// Record the full iterate every this many steps. Scalars are recorded
    /// at every step regardless; the first and last iterates are always
    /// kept. Zero is treated as one.
    pub point_stride: usize,
}

impl DescentConfig {
    pub fn new(eta: f64, max_iter: usize) -> Self {
        DescentConfig {
            eta,
            max_iter,
            stop_f_tol: None,
            certificate: None,
            point_stride: 1,
        }
    }

    pub fn with_certificate(mut self, cert: Certificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    /// Step size and stopping rule taken from the certificate itself.
    pub fn certified(cert: Certificate, max_iter: usize) -> Self {
        DescentConfig::new(cert.eta, max_iter).with_certificate(cert)
    }
}

struct MonitorState {
    ball_slack: f64,
    rate_slack: f64,
    residual_slack: f64,
    ball_ok: bool,
    rate_ok: bool,
    residual_ok: bool,
}

impl MonitorState {
    fn new() -> Self {
        MonitorState {
            ball_slack: f64::INFINITY,
            rate_slack: f64::INFINITY,
            residual_slack: f64::INFINITY,
            ball_ok: true,
            rate_ok: true,
            residual_ok: true,
        }
    }

    fn into_verdicts(self) -> Vec<MonitorVerdict> {
        vec![
            MonitorVerdict {
                name: String::from("ball_containment"),
                passed: self.ball_ok,
                worst_slack: self.ball_slack,
            },
            MonitorVerdict {
                name: String::from("rate_bound"),
                passed: self.rate_ok,
                worst_slack: self.rate_slack,
            },
            MonitorVerdict {
                name: String::from("descent_residual"),
                passed: self.residual_ok,
                worst_slack: self.residual_slack,
            },
        ]
    }
}

/// Run gradient descent from `x0`. Iterates until `f` drops below the stop
/// tolerance or `max_iter` steps have been taken. Non-finite values abort
/// with a divergence error carrying the number of completed steps.
pub fn run_descent(f: &dyn Objective, x0: &[f64], cfg: &DescentConfig) -> Result<Trace> {
    if !(cfg.eta > 0.0) || !cfg.eta.is_finite() {
        return Err(Error::Input(alloc::format!(
            "step size must be positive and finite, got {}",
            cfg.eta
        )));
    }
    if cfg.max_iter == 0 {
        return Err(Error::Input("max_iter must be at least 1".into()));
    }
    if x0.len() != f.dim() {
        return Err(Error::Input(alloc::format!(
            "dimension mismatch: objective has dimension {}, x0 has {}",
            f.dim(),
            x0.len()
        )));
    }
    ensure_finite(x0, "x0")?;

    let stride = cfg.point_stride.max(1);
    let cert = cfg.certificate.as_ref();
    let mut x = x0.to_vec();
    let mut grad = vec![0.0; x.len()];
    let mut fk = f.value(&x);
    if !fk.is_finite() {
        return Err(Error::Divergence { steps_completed: 0 });
    }
    let f0 = fk;
    let stop_tol = cfg.stop_f_tol.unwrap_or(1e-10 * f0.max(1.0));

    let mut steps = Vec::new();
    let mut points: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut monitors = MonitorState::new();
    let mut prev_f = 0.0;
    let mut prev_gn = 0.0;
    let mut k = 0usize;

    loop {
        f.gradient_into(&x, &mut grad);
        let gn = norm(&grad);
        if !fk.is_finite() || !gn.is_finite() {
            return Err(Error::Divergence { steps_completed: k });
        }

        let d0 = dist(&x, x0);
        let monitor = cert.map(|c| {
            let r = c.ball.radius();
            let ball_cap = r * (1.0 + BALL_TOL);
            let ball_ok = d0 <= ball_cap;
            monitors.ball_ok &= ball_ok;
            monitors.ball_slack = monitors.ball_slack.min(ball_cap - d0);

            let rate_bound = math::pow(1.0 - c.delta, k as f64) * f0;
            let rate_cap = rate_bound * (1.0 + RATE_TOL);
            let rate_ok = fk <= rate_cap;
            monitors.rate_ok &= rate_ok;
            monitors.rate_slack = monitors.rate_slack.min(rate_cap - fk);

            let residual_ok = if k == 0 {
                None
            } else {
                let residual = fk - prev_f + cfg.eta * prev_gn * prev_gn;
                let cap = c.epsilon * cfg.eta * prev_gn * prev_gn * (1.0 + RATE_TOL);
                let ok = math::abs(residual) <= cap;
                monitors.residual_ok &= ok;
                monitors.residual_slack = monitors.residual_slack.min(cap - math::abs(residual));
                Some(ok)
            };
            StepMonitor {
                rate_bound,
                ball_ok,
                rate_ok,
                residual_ok,
            }
        });

        steps.push(TraceStep {
            time: k as f64,
            f: fk,
            grad_norm: gn,
            dist_from_start: d0,
            monitor,
        });
        if k % stride == 0 {
            points.push((k, x.clone()));
        }

        if fk <= stop_tol || k >= cfg.max_iter {
            if points.last().map(|(i, _)| *i) != Some(k) {
                points.push((k, x.clone()));
            }
            break;
        }

        axpy(-cfg.eta, &grad, &mut x);
        prev_f = fk;
        prev_gn = gn;
        fk = f.value(&x);
        k += 1;
    }

    let verdicts = if cert.is_some() {
        monitors.into_verdicts()
    } else {
        Vec::new()
    };
    Ok(Trace {
        kind: TraceKind::Descent { eta: cfg.eta },
        steps,
        points,
        verdicts,
    })
}

/// Re-check the certificate bounds of a finished descent trace: ball
/// containment and the geometric rate at every recorded step, plus the
/// distance to the final iterate (as a proxy for the limit) at every stored
/// point. Violations are reported, never raised; the only error is a trace
/// whose step size differs from the certificate's.
pub fn verify_rate_bounds(trace: &Trace, cert: &Certificate) -> Result<BoundReport> {
    let TraceKind::Descent { eta } = trace.kind else {
        return Err(Error::Input("expected a descent trace".into()));
    };
    if eta != cert.eta {
        return Err(Error::Input(alloc::format!(
            "trace was produced with eta {eta}, certificate has {}",
            cert.eta
        )));
    }
    if trace.steps.is_empty() {
        return Err(Error::Input("empty trace".into()));
    }

    let f0 = trace.steps[0].f;
    let r = cert.ball.radius();
    let mut monitors = MonitorState::new();
    let mut per_step = Vec::with_capacity(trace.steps.len().saturating_sub(1));

    for (k, step) in trace.steps.iter().enumerate() {
        let ball_cap = r * (1.0 + BALL_TOL);
        let ball_ok = step.dist_from_start <= ball_cap;
        let rate_cap = math::pow(1.0 - cert.delta, k as f64) * f0 * (1.0 + RATE_TOL);
        let rate_ok = step.f <= rate_cap;
        monitors.ball_ok &= ball_ok;
        monitors.ball_slack = monitors.ball_slack.min(ball_cap - step.dist_from_start);
        monitors.rate_ok &= rate_ok;
        monitors.rate_slack = monitors.rate_slack.min(rate_cap - step.f);

        if k > 0 {
            let prev = &trace.steps[k - 1];
            let residual = step.f - prev.f + eta * prev.grad_norm * prev.grad_norm;
            let cap = cert.epsilon * eta * prev.grad_norm * prev.grad_norm * (1.0 + RATE_TOL);
            let residual_ok = math::abs(residual) <= cap;
            monitors.residual_ok &= residual_ok;
            monitors.residual_slack = monitors.residual_slack.min(cap - math::abs(residual));
            per_step.push(StepBounds {
                ball_ok,
                rate_ok,
                residual_ok,
                residual,
            });
        }
    }

    // Distance to the limit, using the final iterate as proxy and adding its
    // own analytic tail (1-delta)^{K/2} r to the allowance.
    let last_index = trace.steps.len() - 1;
    let mut dist_ok = true;
    let mut dist_slack = f64::INFINITY;
    if let Some((_, x_final)) = trace.points.last() {
        let tail = math::pow(1.0 - cert.delta, last_index as f64 / 2.0) * r;
        for (k, x) in &trace.points {
            if *k >= last_index {
                continue;
            }
            let cap = math::pow(1.0 - cert.delta, *k as f64 / 2.0) * r * (1.0 + RATE_TOL) + tail;
            let d = dist(x, x_final);
            dist_ok &= d <= cap;
            dist_slack = dist_slack.min(cap - d);
        }
    }

    let mut summary = monitors.into_verdicts();
    summary.push(MonitorVerdict {
        name: String::from("distance_to_limit"),
        passed: dist_ok,
        worst_slack: dist_slack,
    });
    Ok(BoundReport {
        steps: per_step,
        summary,
    })
}

/// Recompute the Taylor residual `R_j` of every completed step and flag the
/// ones exceeding `epsilon * eta * |grad f(x_j)|^2`.
pub fn check_descent_residual(trace: &Trace, cert: &Certificate) -> Result<BoundReport> {
    let TraceKind::Descent { eta } = trace.kind else {
        return Err(Error::Input("expected a descent trace".into()));
    };
    let mut per_step = Vec::with_capacity(trace.steps.len().saturating_sub(1));
    let mut worst = f64::INFINITY;
    let mut all_ok = true;
    for pair in trace.steps.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        let residual = next.f - prev.f + eta * prev.grad_norm * prev.grad_norm;
        let cap = cert.epsilon * eta * prev.grad_norm * prev.grad_norm * (1.0 + RATE_TOL);
        let ok = math::abs(residual) <= cap;
        all_ok &= ok;
        worst = worst.min(cap - math::abs(residual));
        per_step.push(StepBounds {
            ball_ok: true,
            rate_ok: true,
            residual_ok: ok,
            residual,
        });
    }
    Ok(BoundReport {
        steps: per_step,
        summary: vec![MonitorVerdict {
            name: String::from("descent_residual"),
            passed: all_ok,
            worst_slack: worst,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{build_certificate, AlphaEstimate, LipschitzBounds};
    use crate::linalg::Ball;
    use crate::objective::Quadratic;

    fn unit_quadratic_cert() -> Certificate {
        // x0 = 1, r = 1 fails the criterion (4*1 = 4 = r^2 alpha), so use
        // r = 1.5: |2x| <= 5 on [-0.5, 2.5], Hessian 2.
        let q = Quadratic::isotropic(1);
        let ball = Ball::new(vec![1.0], 1.5).unwrap();
        build_certificate(
            &q,
            &ball,
            AlphaEstimate::analytic(4.0).unwrap(),
            LipschitzBounds::analytic(5.0, 2.0),
        )
        .unwrap()
    }

    #[test]
    fn quadratic_descent_closed_form() {
        // eta = 0.25 halves x each step, so f(x_k) = 0.25^k * f(x0).
        let q = Quadratic::isotropic(1);
        let trace = run_descent(&q, &[1.0], &DescentConfig::new(0.25, 10)).unwrap();
        assert_eq!(trace.len(), 11);
        let mut expect = 1.0;
        for step in &trace.steps {
            assert_eq!(step.f, expect * expect);
            expect *= 0.5;
        }
        let f10 = trace.final_f();
        assert!((f10 - 9.5367431640625e-7).abs() < 1e-20, "got {f10}");
    }

    #[test]
    fn zero_gradient_start_is_fixed_point() {
        let q = Quadratic::isotropic(2);
        let trace = run_descent(&q, &[0.0, 0.0], &DescentConfig::new(0.1, 5)).unwrap();
        // stops immediately at the zero-loss tolerance
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.final_point().unwrap(), &[0.0, 0.0]);

        // force it past the stop tolerance: iterates must not move
        let cfg = DescentConfig {
            stop_f_tol: Some(-1.0),
            ..DescentConfig::new(0.1, 5)
        };
        let trace = run_descent(&q, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(trace.len(), 6);
        for (_, x) in &trace.points {
            assert_eq!(x.as_slice(), &[0.0, 0.0]);
        }
    }

    #[test]
    fn divergent_step_size_reports_divergence() {
        let q = Quadratic::isotropic(1);
        // |1 - 2 eta| = 39: f grows by ~1500x per step and overflows.
        let err = run_descent(&q, &[1.0], &DescentConfig::new(20.0, 10_000)).unwrap_err();
        match err {
            Error::Divergence { steps_completed } => assert!(steps_completed > 0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn monitored_run_passes_with_valid_certificate() {
        let q = Quadratic::isotropic(1);
        let cert = unit_quadratic_cert();
        let cfg = DescentConfig::certified(cert.clone(), 200);
        let trace = run_descent(&q, &[1.0], &cfg).unwrap();
        assert_eq!(trace.all_monitors_passed(), Some(true));

        let report = verify_rate_bounds(&trace, &cert).unwrap();
        assert!(report.all_passed(), "{:?}", report.summary);
        let residual = check_descent_residual(&trace, &cert).unwrap();
        assert!(residual.all_passed());
    }

    #[test]
    fn monotone_descent_and_displayed_inequality() {
        // f(x_j) - f(x_{j+1}) >= (1 - epsilon) eta |grad f(x_j)|^2 under a
        // valid certificate.
        let q = Quadratic::isotropic(1);
        let cert = unit_quadratic_cert();
        let cfg = DescentConfig {
            stop_f_tol: Some(0.0),
            ..DescentConfig::certified(cert.clone(), 200)
        };
        let trace = run_descent(&q, &[1.0], &cfg).unwrap();
        for pair in trace.steps.windows(2) {
            let lhs = pair[0].f - pair[1].f;
            let rhs = (1.0 - cert.epsilon) * cert.eta * pair[0].grad_norm * pair[0].grad_norm;
            assert!(lhs >= rhs * (1.0 - 1e-9), "lhs {lhs} rhs {rhs}");
            assert!(pair[1].f <= pair[0].f);
        }
    }

    #[test]
    fn oversized_step_reports_failures_without_panicking() {
        // eta = 0.95 on f = x^2 flips the sign each step: containment, rate,
        // and residual all fail, and verification still returns a report.
        let q = Quadratic::isotropic(1);
        let cert = unit_quadratic_cert();
        let mut loud = cert.clone();
        loud.eta = 0.95;
        let cfg = DescentConfig {
            stop_f_tol: Some(0.0),
            ..DescentConfig::certified(loud.clone(), 50)
        };
        let trace = run_descent(&q, &[1.0], &cfg).unwrap();
        assert_eq!(trace.all_monitors_passed(), Some(false));

        let report = verify_rate_bounds(&trace, &loud).unwrap();
        assert!(!report.all_passed());
        assert!(!report.verdict("ball_containment").unwrap().passed);
        assert!(!report.verdict("rate_bound").unwrap().passed);
        assert!(!report.verdict("descent_residual").unwrap().passed);
    }

    #[test]
    fn verify_rejects_mismatched_eta() {
        let q = Quadratic::isotropic(1);
        let cert = unit_quadratic_cert();
        let trace = run_descent(&q, &[1.0], &DescentConfig::new(cert.eta * 0.5, 10)).unwrap();
        assert!(verify_rate_bounds(&trace, &cert).is_err());
    }

    #[test]
    fn single_step_at_minimum_trivially_passes() {
        let q = Quadratic::isotropic(1);
        let ball = Ball::new(vec![0.0], 1.0).unwrap();
        let cert = build_certificate(
            &q,
            &ball,
            AlphaEstimate::analytic(4.0).unwrap(),
            LipschitzBounds::analytic(2.0, 2.0),
        )
        .unwrap();
        let cfg = DescentConfig::certified(cert.clone(), 1);
        let trace = run_descent(&q, &[0.0], &cfg).unwrap();
        let report = verify_rate_bounds(&trace, &cert).unwrap();
        assert!(report.all_passed());
    }

    #[test]
    fn residual_recomputation_is_bit_exact() {
        let q = Quadratic::new(vec![1.0, 3.0]).unwrap();
        let cert_ball = Ball::new(vec![0.4, 0.2], 1.0).unwrap();
        let cert = build_certificate(
            &q,
            &cert_ball,
            AlphaEstimate::analytic(4.0).unwrap(),
            LipschitzBounds::analytic(9.0, 6.0),
        )
        .unwrap();
        let cfg = DescentConfig::certified(cert.clone(), 60);
        let trace = run_descent(&q, &[0.4, 0.2], &cfg).unwrap();
        let a = check_descent_residual(&trace, &cert).unwrap();
        let b = check_descent_residual(&trace, &cert).unwrap();
        for (ra, rb) in a.steps.iter().zip(b.steps.iter()) {
            assert_eq!(ra.residual.to_bits(), rb.residual.to_bits());
        }
        // and against the defining expression evaluated directly
        for (j, bounds) in a.steps.iter().enumerate() {
            let expect = trace.steps[j + 1].f - trace.steps[j].f
                + cert.eta * trace.steps[j].grad_norm * trace.steps[j].grad_norm;
            assert_eq!(bounds.residual.to_bits(), expect.to_bits());
        }
    }
}
