//! On-disk artifact formats: trace CSV, certificate/report/params JSON.
//!
//! Writers are deterministic: field order is fixed by the struct
//! declarations, floats go through the shortest-roundtrip formatter, and no
//! timestamps or environment data are embedded. Rerunning a command with
//! the same config and seed reproduces every artifact byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use gradcert::certificate::{AlphaKind, BoundMode, Certificate};
use gradcert::init::ThetaEstimate;
use gradcert::linalg::Ball;
use gradcert::nn::{NetworkArchitecture, NetworkParams};
use gradcert::trace::{MonitorVerdict, Trace, TraceKind};
use gradcert::{AlphaEstimate, Error as CoreError};

use crate::config::ActivationConfig;

/// `f64` that serializes the infinity sentinel as JSON `null`.
mod sentinel_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub center: Vec<f64>,
    pub radius: f64,
    pub f_x0: f64,
    /// `null` encodes the infinite sentinel (objective vanished at every
    /// probed point).
    #[serde(with = "sentinel_f64")]
    pub alpha: f64,
    pub alpha_kind: String,
    pub alpha_samples: usize,
    pub epsilon: f64,
    pub l1: f64,
    pub l2: f64,
    pub lipschitz_mode: String,
    pub eta: f64,
    pub delta: f64,
    pub provenance: String,
}

impl CertificateDoc {
    pub fn from_certificate(cert: &Certificate) -> Self {
        CertificateDoc {
            center: cert.ball.center().to_vec(),
            radius: cert.ball.radius(),
            f_x0: cert.f_x0,
            alpha: cert.alpha.value,
            alpha_kind: match cert.alpha.kind {
                AlphaKind::Analytic => "analytic",
                AlphaKind::Sampled => "sampled",
                AlphaKind::GridOracle => "grid-oracle",
            }
            .into(),
            alpha_samples: cert.alpha.sample_count,
            epsilon: cert.epsilon,
            l1: cert.l1,
            l2: cert.l2,
            lipschitz_mode: match cert.lipschitz_mode {
                BoundMode::Analytic => "analytic",
                BoundMode::Sampled => "sampled",
            }
            .into(),
            eta: cert.eta,
            delta: cert.delta,
            provenance: cert.provenance().label().into(),
        }
    }

    pub fn into_certificate(self) -> Result<Certificate, String> {
        let kind = match self.alpha_kind.as_str() {
            "analytic" => AlphaKind::Analytic,
            "sampled" => AlphaKind::Sampled,
            "grid-oracle" => AlphaKind::GridOracle,
            other => return Err(format!("unknown alpha kind {other:?}")),
        };
        let lipschitz_mode = match self.lipschitz_mode.as_str() {
            "analytic" => BoundMode::Analytic,
            "sampled" => BoundMode::Sampled,
            other => return Err(format!("unknown lipschitz mode {other:?}")),
        };
        Ok(Certificate {
            ball: Ball::new(self.center, self.radius).map_err(|e| e.to_string())?,
            f_x0: self.f_x0,
            alpha: AlphaEstimate {
                value: self.alpha,
                kind,
                sample_count: self.alpha_samples,
            },
            epsilon: self.epsilon,
            l1: self.l1,
            l2: self.l2,
            lipschitz_mode,
            eta: self.eta,
            delta: self.delta,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonitorDoc {
    pub name: String,
    pub passed: bool,
    #[serde(with = "sentinel_f64")]
    pub worst_slack: f64,
}

impl From<&MonitorVerdict> for MonitorDoc {
    fn from(v: &MonitorVerdict) -> Self {
        MonitorDoc {
            name: v.name.clone(),
            passed: v.passed,
            worst_slack: v.worst_slack,
        }
    }
}

/// Per-run summary written next to the trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDoc {
    pub command: String,
    pub steps: usize,
    pub final_f: f64,
    pub final_grad_norm: f64,
    /// `null` when the run had no certificate attached.
    pub monitors_passed: Option<bool>,
    pub monitors: Vec<MonitorDoc>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    /// Row-major weight matrix, one inner vector per output unit.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

/// Network parameters with explicit shapes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub input_dim: usize,
    pub layer_dims: Vec<usize>,
    pub activations: Vec<ActivationConfig>,
    pub layers: Vec<LayerDoc>,
}

impl ParamsDoc {
    pub fn from_params(arch: &NetworkArchitecture, params: &NetworkParams) -> Self {
        let layers = (0..arch.depth())
            .map(|li| {
                let cols = arch.fan_in(li);
                let w = params.weights(arch, li);
                LayerDoc {
                    weights: w.chunks(cols).map(|row| row.to_vec()).collect(),
                    bias: params.bias(arch, li).to_vec(),
                }
            })
            .collect();
        ParamsDoc {
            input_dim: arch.input_dim(),
            layer_dims: arch.layer_dims().to_vec(),
            activations: arch.activations().iter().map(ActivationConfig::from).collect(),
            layers,
        }
    }

    /// Rebuild the flat vector, checking shapes against the architecture.
    pub fn into_params(self, arch: &NetworkArchitecture) -> Result<NetworkParams, String> {
        if self.layer_dims != arch.layer_dims() || self.input_dim != arch.input_dim() {
            return Err(format!(
                "params file was saved for dims {:?} (input {}), config declares {:?} (input {})",
                self.layer_dims,
                self.input_dim,
                arch.layer_dims(),
                arch.input_dim()
            ));
        }
        let mut flat = vec![0.0; arch.param_count()];
        if self.layers.len() != arch.depth() {
            return Err("params file has the wrong number of layers".into());
        }
        for (li, layer) in self.layers.iter().enumerate() {
            let rows = arch.layer_dims()[li];
            let cols = arch.fan_in(li);
            if layer.weights.len() != rows || layer.weights.iter().any(|r| r.len() != cols) {
                return Err(format!("layer {li} weight shape mismatch"));
            }
            if layer.bias.len() != rows {
                return Err(format!("layer {li} bias length mismatch"));
            }
            let w_range = arch.weight_range(li);
            let flat_w = &mut flat[w_range];
            for (i, row) in layer.weights.iter().enumerate() {
                flat_w[i * cols..(i + 1) * cols].copy_from_slice(row);
            }
            flat[arch.bias_range(li)].copy_from_slice(&layer.bias);
        }
        NetworkParams::from_flat(arch, flat).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaSummaryDoc {
    pub trials: usize,
    pub successes: usize,
    pub theta_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub eta: f64,
    pub budget: usize,
    pub tol: f64,
}

impl ThetaSummaryDoc {
    pub fn new(est: &ThetaEstimate, eta: f64, budget: usize, tol: f64) -> Self {
        ThetaSummaryDoc {
            trials: est.outcomes.len(),
            successes: est.outcomes.iter().filter(|o| o.success).count(),
            theta_hat: est.theta_hat,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            eta,
            budget,
            tol,
        }
    }
}

fn fmt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

/// Descent trace CSV: `k,f,grad_norm,dist_x0,rate_bound,ball_ok,rate_ok,residual_ok`.
/// Monitor columns are empty when the run had no certificate; the residual
/// column of row `k` refers to the transition into iterate `k` (empty on
/// row 0). Flow traces use `t` and the exponential bound instead:
/// `t,f,grad_norm,dist_x0,exp_bound,ball_ok,rate_ok`.
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::new();
    match trace.kind {
        TraceKind::Descent { .. } => {
            out.push_str("k,f,grad_norm,dist_x0,rate_bound,ball_ok,rate_ok,residual_ok\n");
            for (k, s) in trace.steps.iter().enumerate() {
                let (bound, ball, rate, resid) = match &s.monitor {
                    Some(m) => (
                        format!("{}", m.rate_bound),
                        fmt_bool(Some(m.ball_ok)),
                        fmt_bool(Some(m.rate_ok)),
                        fmt_bool(m.residual_ok),
                    ),
                    None => (String::new(), "", "", ""),
                };
                let _ = writeln!(
                    out,
                    "{k},{},{},{},{bound},{ball},{rate},{resid}",
                    s.f, s.grad_norm, s.dist_from_start
                );
            }
        }
        TraceKind::Flow { .. } => {
            out.push_str("t,f,grad_norm,dist_x0,exp_bound,ball_ok,rate_ok\n");
            for s in &trace.steps {
                let (bound, ball, rate) = match &s.monitor {
                    Some(m) => (
                        format!("{}", m.rate_bound),
                        fmt_bool(Some(m.ball_ok)),
                        fmt_bool(Some(m.rate_ok)),
                    ),
                    None => (String::new(), "", ""),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{bound},{ball},{rate}",
                    s.time, s.f, s.grad_norm, s.dist_from_start
                );
            }
        }
    }
    out
}

/// Per-trial CSV for the success-probability experiment:
/// `trial,seed,final_S,iterations,success`.
pub fn trials_to_csv(est: &ThetaEstimate) -> String {
    let mut out = String::from("trial,seed,final_S,iterations,success\n");
    for o in &est.outcomes {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            o.trial, o.seed, o.final_loss, o.iterations, o.success
        );
    }
    out
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, doc: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| format!("cannot serialize {name}: {e}"))?;
    text.push('\n');
    write_text(dir, name, &text)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn read_params(path: &Path, arch: &NetworkArchitecture) -> Result<NetworkParams, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read params {}: {e}", path.display()))?;
    let doc: ParamsDoc =
        serde_json::from_str(&text).map_err(|e| format!("malformed params {}: {e}", path.display()))?;
    doc.into_params(arch)
}

pub fn core_error_string(e: &CoreError) -> String {
    e.to_string()
}
