//! Run configuration: one JSON document per run with sections
//! `{seed, objective | network, data, certificate, run, output}`.
//!
//! The loader is strict: unknown fields are rejected so typos surface as
//! config errors instead of silently-ignored settings.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use gradcert::nn::{Activation, Dataset, NetworkArchitecture};
use gradcert::objective::{ExpObjective, Objective, Quadratic};
use gradcert::Error as CoreError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every random stream is derived from it and a role tag.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateConfig>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveConfig {
    Quadratic { coefficients: Vec<f64>, x0: Vec<f64> },
    Exp1d { x0: f64 },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub layer_dims: Vec<usize>,
    pub activations: Vec<ActivationConfig>,
    pub init: InitConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum ActivationConfig {
    Linear,
    Tanh,
    BipolarSigmoid,
    SmoothLeakyRelu { negative_slope: f64 },
    Softplus,
}

impl From<&ActivationConfig> for Activation {
    fn from(cfg: &ActivationConfig) -> Activation {
        match cfg {
            ActivationConfig::Linear => Activation::Linear,
            ActivationConfig::Tanh => Activation::Tanh,
            ActivationConfig::BipolarSigmoid => Activation::BipolarSigmoid,
            ActivationConfig::SmoothLeakyRelu { negative_slope } => Activation::SmoothLeakyRelu {
                negative_slope: *negative_slope,
            },
            ActivationConfig::Softplus => Activation::Softplus,
        }
    }
}

impl From<&Activation> for ActivationConfig {
    fn from(act: &Activation) -> ActivationConfig {
        match act {
            Activation::Linear => ActivationConfig::Linear,
            Activation::Tanh => ActivationConfig::Tanh,
            Activation::BipolarSigmoid => ActivationConfig::BipolarSigmoid,
            Activation::SmoothLeakyRelu { negative_slope } => ActivationConfig::SmoothLeakyRelu {
                negative_slope: *negative_slope,
            },
            Activation::Softplus => ActivationConfig::Softplus,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum InitConfig {
    /// Structured zero-output initialization with middle entries in
    /// `[delta, k_max]`; the output scale comes from the doubling search.
    Theorem3 { delta: f64, k_max: f64 },
    /// Gaussian fan-in initialization with variance `c / fan_in`.
    Lecun { c: f64 },
    /// Load previously saved parameters.
    ParamsFile { path: String },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DataConfig {
    /// Plain numeric CSV, no header: the first `d` columns are the input,
    /// the last column is the target.
    Csv { csv: String },
    Inline {
        inputs: Vec<Vec<f64>>,
        targets: Vec<f64>,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    /// Ball radius around the starting point (generic objectives). Network
    /// certificates use `delta / 2` from the Theorem-3 init instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default)]
    pub alpha: AlphaConfig,
    #[serde(default)]
    pub lipschitz: LipschitzConfig,
    /// Optional override for the slack parameter; the default is the
    /// midpoint rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "mode", rename_all = "snake_case")]
pub enum AlphaConfig {
    #[default]
    Analytic,
    Sampled {
        #[serde(default = "default_alpha_samples")]
        samples: usize,
    },
}

fn default_alpha_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, tag = "mode", rename_all = "snake_case")]
pub enum LipschitzConfig {
    #[default]
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Step size for descent. When omitted and a certificate is in play,
    /// the certified step size is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_f_tol: Option<f64>,
    #[serde(default = "default_point_stride")]
    pub point_stride: usize,
    /// Flow horizon and integration step.
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default)]
    pub method: MethodConfig,
    /// Success-probability experiment parameters.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Grid resolution for the alpha oracle.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty run section deserializes")
    }
}

fn default_max_iter() -> usize {
    100_000
}
fn default_point_stride() -> usize {
    1
}
fn default_t_end() -> f64 {
    1.0
}
fn default_h() -> f64 {
    1e-3
}
fn default_trials() -> usize {
    50
}
fn default_c() -> f64 {
    1.0
}
fn default_budget() -> usize {
    100_000
}
fn default_tol() -> f64 {
    1e-6
}
fn default_resolution() -> usize {
    10_000
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    Euler,
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
        }
    }
}

fn default_out_dir() -> String {
    String::from("out")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {}: {e}", path.display()))
    }

    pub fn build_objective(&self) -> Result<(Box<dyn Objective>, Vec<f64>), String> {
        let Some(obj) = &self.objective else {
            return Err("config needs an `objective` section for this command".into());
        };
        match obj {
            ObjectiveConfig::Quadratic { coefficients, x0 } => {
                if coefficients.len() != x0.len() {
                    return Err(format!(
                        "quadratic has {} coefficients but x0 has dimension {}",
                        coefficients.len(),
                        x0.len()
                    ));
                }
                let q = Quadratic::new(coefficients.clone()).map_err(stringify)?;
                Ok((Box::new(q), x0.clone()))
            }
            ObjectiveConfig::Exp1d { x0 } => Ok((Box::new(ExpObjective), vec![*x0])),
        }
    }

    pub fn build_architecture(&self) -> Result<NetworkArchitecture, String> {
        let Some(net) = &self.network else {
            return Err("config needs a `network` section for this command".into());
        };
        let acts: Vec<Activation> = net.activations.iter().map(Activation::from).collect();
        NetworkArchitecture::new(net.input_dim, net.layer_dims.clone(), acts).map_err(stringify)
    }

    pub fn build_dataset(&self, config_dir: &Path) -> Result<Dataset, String> {
        let Some(data) = &self.data else {
            return Err("config needs a `data` section for this command".into());
        };
        match data {
            DataConfig::Inline { inputs, targets } => {
                Dataset::new(inputs.clone(), targets.clone()).map_err(stringify)
            }
            DataConfig::Csv { csv } => {
                let path = config_dir.join(csv);
                let text = fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read dataset {}: {e}", path.display()))?;
                parse_dataset_csv(&text).map_err(|e| format!("{}: {e}", path.display()))
            }
        }
    }
}

fn stringify(e: CoreError) -> String {
    e.to_string()
}

/// Plain numeric CSV: each row is `x_1,...,x_d,y`.
pub fn parse_dataset_csv(text: &str) -> Result<Dataset, String> {
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if fields.len() < 2 {
            return Err(format!("line {}: need at least one input column and a target", lineno + 1));
        }
        let (x, y) = fields.split_at(fields.len() - 1);
        inputs.push(x.to_vec());
        targets.push(y[0]);
    }
    Dataset::new(inputs, targets).map_err(stringify)
}
