//! Fixed-step integration of the gradient flow `dx/dt = -grad f(x)` and
//! verification of its exponential bounds.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::linalg::{dist, ensure_finite, norm};
use crate::math;
use crate::objective::Objective;
use crate::report::{BoundReport, StepBounds};
use crate::trace::{MonitorVerdict, StepMonitor, Trace, TraceKind, TraceStep};

const BALL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMethod {
    Euler,
    Rk4,
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub t_end: f64,
    /// Integration step. The monitor tolerance absorbs discretization error
    /// as a `1 + 10 h` factor on the exponential bound.
    pub h: f64,
    pub method: FlowMethod,
    pub certificate: Option<Certificate>,
    pub point_stride: usize,
}

impl FlowConfig {
    pub fn new(t_end: f64, h: f64) -> Self {
        FlowConfig {
            t_end,
            h,
            method: FlowMethod::Rk4,
            certificate: None,
            point_stride: 1,
        }
    }

    pub fn with_certificate(mut self, cert: Certificate) -> Self {
        self.certificate = Some(cert);
        self
    }
}

fn neg_gradient(f: &dyn Objective, x: &[f64], out: &mut [f64]) {
    f.gradient_into(x, out);
    for v in out.iter_mut() {
        *v = -*v;
    }
}

fn euler_step(f: &dyn Objective, x: &mut [f64], h: f64, k1: &mut [f64]) {
    neg_gradient(f, x, k1);
    for (xi, k) in x.iter_mut().zip(k1.iter()) {
        *xi += h * k;
    }
}

fn rk4_step(f: &dyn Objective, x: &mut [f64], h: f64, ws: &mut Rk4Workspace) {
    let n = x.len();
    neg_gradient(f, x, &mut ws.k1);
    for i in 0..n {
        ws.probe[i] = x[i] + 0.5 * h * ws.k1[i];
    }
    neg_gradient(f, &ws.probe, &mut ws.k2);
    for i in 0..n {
        ws.probe[i] = x[i] + 0.5 * h * ws.k2[i];
    }
    neg_gradient(f, &ws.probe, &mut ws.k3);
    for i in 0..n {
        ws.probe[i] = x[i] + h * ws.k3[i];
    }
    neg_gradient(f, &ws.probe, &mut ws.k4);
    for i in 0..n {
        x[i] += h / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    }
}

struct Rk4Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    probe: Vec<f64>,
}

impl Rk4Workspace {
    fn new(n: usize) -> Self {
        Rk4Workspace {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            probe: vec![0.0; n],
        }
    }
}

/// Integrate the gradient flow from `x0` up to `t_end` with fixed step `h`
/// (a shorter final step lands exactly on `t_end`). Records scalars at every
/// step and full states at the configured stride.
pub fn integrate_flow(f: &dyn Objective, x0: &[f64], cfg: &FlowConfig) -> Result<Trace> {
    if !(cfg.h > 0.0) || !cfg.h.is_finite() {
        return Err(Error::Input(alloc::format!(
            "integration step must be positive and finite, got {}",
            cfg.h
        )));
    }
    if !(cfg.t_end > cfg.h) {
        return Err(Error::Input(alloc::format!(
            "t_end must exceed the step size, got t_end={} h={}",
            cfg.t_end,
            cfg.h
        )));
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
    let tol_int = 10.0 * cfg.h;

    let mut x = x0.to_vec();
    let mut ws = Rk4Workspace::new(x.len());
    let mut grad = vec![0.0; x.len()];
    let f0 = f.value(&x);
    if !f0.is_finite() {
        return Err(Error::Divergence { steps_completed: 0 });
    }

    let mut steps = Vec::new();
    let mut points: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut ball_ok_all = true;
    let mut ball_slack = f64::INFINITY;
    let mut rate_ok_all = true;
    let mut rate_slack = f64::INFINITY;

    let mut t = 0.0;
    let mut index = 0usize;
    loop {
        let ft = f.value(&x);
        f.gradient_into(&x, &mut grad);
        let gn = norm(&grad);
        if !ft.is_finite() || !gn.is_finite() {
            return Err(Error::Divergence {
                steps_completed: index,
            });
        }
        let d0 = dist(&x, x0);
        let monitor = cert.map(|c| {
            let ball_cap = c.ball.radius() * (1.0 + BALL_TOL);
            let ball_ok = d0 <= ball_cap;
            ball_ok_all &= ball_ok;
            ball_slack = ball_slack.min(ball_cap - d0);
            let alpha = c.alpha.value;
            let rate_bound = if alpha == f64::INFINITY {
                0.0
            } else {
                math::exp(-alpha * t) * f0
            };
            let rate_cap = rate_bound * (1.0 + tol_int);
            let rate_ok = ft <= rate_cap;
            rate_ok_all &= rate_ok;
            rate_slack = rate_slack.min(rate_cap - ft);
            StepMonitor {
                rate_bound,
                ball_ok,
                rate_ok,
                residual_ok: None,
            }
        });
        steps.push(TraceStep {
            time: t,
            f: ft,
            grad_norm: gn,
            dist_from_start: d0,
            monitor,
        });
        if index % stride == 0 {
            points.push((index, x.clone()));
        }

        let remaining = cfg.t_end - t;
        if remaining <= 1e-12 * cfg.t_end {
            if points.last().map(|(i, _)| *i) != Some(index) {
                points.push((index, x.clone()));
            }
            break;
        }
        let h = cfg.h.min(remaining);
        match cfg.method {
            FlowMethod::Euler => euler_step(f, &mut x, h, &mut ws.k1),
            FlowMethod::Rk4 => rk4_step(f, &mut x, h, &mut ws),
        }
        t += h;
        index += 1;
    }

    let verdicts = if cert.is_some() {
        vec![
            MonitorVerdict {
                name: String::from("ball_containment"),
                passed: ball_ok_all,
                worst_slack: ball_slack,
            },
            MonitorVerdict {
                name: String::from("rate_bound"),
                passed: rate_ok_all,
                worst_slack: rate_slack,
            },
        ]
    } else {
        Vec::new()
    };

    Ok(Trace {
        kind: TraceKind::Flow {
            step: cfg.h,
            method: cfg.method,
        },
        steps,
        points,
        verdicts,
    })
}

/// Re-check the flow bounds on a finished trace: ball containment and
/// `f(x(t)) <= e^{-alpha t} f(x0) (1 + 10h)` at every sample, plus the
/// distance to the final state as a proxy for the limit.
pub fn verify_flow_bounds(trace: &Trace, cert: &Certificate) -> Result<BoundReport> {
    let TraceKind::Flow { step, .. } = trace.kind else {
        return Err(Error::Input("expected a flow trace".into()));
    };
    if trace.steps.is_empty() {
        return Err(Error::Input("empty trace".into()));
    }
    let tol_int = 10.0 * step;
    let f0 = trace.steps[0].f;
    let r = cert.ball.radius();
    let alpha = cert.alpha.value;

    let mut per_step = Vec::with_capacity(trace.steps.len());
    let mut ball_ok_all = true;
    let mut ball_slack = f64::INFINITY;
    let mut rate_ok_all = true;
    let mut rate_slack = f64::INFINITY;
    for s in &trace.steps {
        let ball_cap = r * (1.0 + BALL_TOL);
        let ball_ok = s.dist_from_start <= ball_cap;
        let bound = if alpha == f64::INFINITY {
            0.0
        } else {
            math::exp(-alpha * s.time) * f0
        };
        let rate_cap = bound * (1.0 + tol_int);
        let rate_ok = s.f <= rate_cap;
        ball_ok_all &= ball_ok;
        ball_slack = ball_slack.min(ball_cap - s.dist_from_start);
        rate_ok_all &= rate_ok;
        rate_slack = rate_slack.min(rate_cap - s.f);
        per_step.push(StepBounds {
            ball_ok,
            rate_ok,
            residual_ok: true,
            residual: 0.0,
        });
    }

    // Distance bound |x(t) - x*| <= r e^{-alpha t / 2}, with the final state
    // standing in for the limit and contributing its own tail allowance.
    let mut dist_ok = true;
    let mut dist_slack = f64::INFINITY;
    if let (Some((last_idx, x_final)), false) = (trace.points.last(), alpha == f64::INFINITY) {
        let t_final = trace.steps[*last_idx].time;
        let tail = r * math::exp(-alpha * t_final / 2.0);
        for (idx, x) in &trace.points {
            if idx >= last_idx {
                continue;
            }
            let t = trace.steps[*idx].time;
            let cap = r * math::exp(-alpha * t / 2.0) * (1.0 + tol_int) + tail;
            let d = dist(x, x_final);
            dist_ok &= d <= cap;
            dist_slack = dist_slack.min(cap - d);
        }
    }

    Ok(BoundReport {
        steps: per_step,
        summary: vec![
            MonitorVerdict {
                name: String::from("ball_containment"),
                passed: ball_ok_all,
                worst_slack: ball_slack,
            },
            MonitorVerdict {
                name: String::from("rate_bound"),
                passed: rate_ok_all,
                worst_slack: rate_slack,
            },
            MonitorVerdict {
                name: String::from("distance_to_limit"),
                passed: dist_ok,
                worst_slack: dist_slack,
            },
        ],
    })
}

/// Maximum deviation `max_k |x_k - x(k eta)|` between descent iterates and
/// the flow, the latter integrated by rk4 with step `eta / 100`.
pub fn compare_flow_descent(
    f: &dyn Objective,
    x0: &[f64],
    eta: f64,
    steps: usize,
) -> Result<f64> {
    if !(eta > 0.0) || steps == 0 {
        return Err(Error::Input("need eta > 0 and at least one step".into()));
    }
    ensure_finite(x0, "x0")?;
    const SUBSTEPS: usize = 100;
    let h = eta / SUBSTEPS as f64;
    let mut discrete = x0.to_vec();
    let mut continuous = x0.to_vec();
    let mut grad = vec![0.0; x0.len()];
    let mut ws = Rk4Workspace::new(x0.len());
    let mut worst = 0.0f64;
    for _ in 0..steps {
        f.gradient_into(&discrete, &mut grad);
        for (xi, g) in discrete.iter_mut().zip(grad.iter()) {
            *xi -= eta * g;
        }
        for _ in 0..SUBSTEPS {
            rk4_step(f, &mut continuous, h, &mut ws);
        }
        ensure_finite(&discrete, "descent iterate")
            .map_err(|_| Error::Divergence { steps_completed: 0 })?;
        worst = worst.max(dist(&discrete, &continuous));
    }
    Ok(worst)
}
