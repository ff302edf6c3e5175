//! Built-in activations with the derivative and envelope queries the bound
//! chain needs.
//!
//! Every activation here vanishes at the origin and has a strictly positive
//! derivative; the smooth leaky ReLU and softplus are shifted by `log 2` to
//! enforce the former.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;

const LN_2: f64 = core::f64::consts::LN_2;

/// `sech^2(x)`, evaluated through exponentials so it stays positive out to
/// `|x| ~ 370` where `1 - tanh(x)^2` would already cancel to zero.
fn sech_sq(x: f64) -> f64 {
    let e = math::exp(-math::abs(x));
    let s = 2.0 * e / (1.0 + e * e);
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    /// Identity.
    Linear,
    Tanh,
    /// `(1 - e^{-x}) / (1 + e^{-x})`, equal to `tanh(x/2)`.
    BipolarSigmoid,
    /// `a x + (1-a) (log(1 + e^x) - log 2)` with `a` in (0,1). Slopes lie in
    /// `(a, 1)` globally.
    SmoothLeakyRelu { negative_slope: f64 },
    /// `log(1 + e^x) - log 2`.
    Softplus,
}

impl Activation {
    pub fn name(&self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Tanh => "tanh",
            Activation::BipolarSigmoid => "bipolar_sigmoid",
            Activation::SmoothLeakyRelu { .. } => "smooth_leaky_relu",
            Activation::Softplus => "softplus",
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Activation::Linear => x,
            Activation::Tanh => math::tanh(x),
            Activation::BipolarSigmoid => math::tanh(0.5 * x),
            Activation::SmoothLeakyRelu { negative_slope: a } => {
                a * x + (1.0 - a) * (math::softplus(x) - LN_2)
            }
            Activation::Softplus => math::softplus(x) - LN_2,
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Tanh => sech_sq(x),
            Activation::BipolarSigmoid => 0.5 * sech_sq(0.5 * x),
            Activation::SmoothLeakyRelu { negative_slope: a } => {
                a + (1.0 - a) * math::logistic(x)
            }
            Activation::Softplus => math::logistic(x),
        }
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        match self {
            Activation::Linear => 0.0,
            Activation::Tanh => -2.0 * math::tanh(x) * sech_sq(x),
            Activation::BipolarSigmoid => -0.5 * math::tanh(0.5 * x) * sech_sq(0.5 * x),
            Activation::SmoothLeakyRelu { negative_slope: a } => {
                let s = math::logistic(x);
                (1.0 - a) * s * (1.0 - s)
            }
            Activation::Softplus => {
                let s = math::logistic(x);
                s * (1.0 - s)
            }
        }
    }

    /// Global slope floor `C1`, when one exists.
    pub fn slope_floor(&self) -> Option<f64> {
        match self {
            Activation::Linear => Some(1.0),
            Activation::SmoothLeakyRelu { negative_slope: a } => Some(*a),
            _ => None,
        }
    }

    /// Global slope cap `C2`. All built-ins have one.
    pub fn slope_cap(&self) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Tanh => 1.0,
            Activation::BipolarSigmoid => 0.5,
            Activation::SmoothLeakyRelu { .. } => 1.0,
            Activation::Softplus => 1.0,
        }
    }

    /// Global bound on `|second derivative|`.
    pub fn second_deriv_cap(&self) -> f64 {
        // max |(-2) t (1 - t^2)| over t in (-1,1) is 4 / (3 sqrt 3)
        const TANH_CAP: f64 = 0.7698003589195010;
        match self {
            Activation::Linear => 0.0,
            Activation::Tanh => TANH_CAP,
            Activation::BipolarSigmoid => 0.25 * TANH_CAP,
            Activation::SmoothLeakyRelu { negative_slope: a } => 0.25 * (1.0 - a),
            Activation::Softplus => 0.25,
        }
    }

    /// Symmetric envelope `max(sigma(x), |sigma(-x)|)` for `x >= 0`. Since
    /// `sigma(0) = 0` and the slope is positive, both branches are
    /// magnitudes of values the activation can reach on `[-x, x]`.
    pub fn gamma(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        self.value(x).max(math::abs(self.value(-x)))
    }

    /// Minimum slope over `[-a, a]`.
    ///
    /// Activations whose slope is even with its maximum at the origin
    /// (tanh, bipolar sigmoid, and trivially linear) evaluate `sigma'(a)`
    /// exactly. Activations with a global floor take the floor or a damped
    /// grid minimum, whichever is larger. Anything else falls back to a
    /// 10001-point grid scan scaled by 0.999 to stay on the safe side of
    /// grid error.
    pub fn min_slope(&self, a: f64) -> Result<f64> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Input(format!("slope range must be positive and finite, got {a}")));
        }
        let c = match self {
            Activation::Linear | Activation::Tanh | Activation::BipolarSigmoid => self.deriv(a),
            Activation::SmoothLeakyRelu { negative_slope } => {
                negative_slope.max(0.999 * self.grid_min_slope(a))
            }
            Activation::Softplus => 0.999 * self.grid_min_slope(a),
        };
        if !(c > 0.0) {
            return Err(Error::ActivationContract(format!(
                "{} reported a non-positive minimum slope {c} on [-{a}, {a}]",
                self.name()
            )));
        }
        Ok(c)
    }

    fn grid_min_slope(&self, a: f64) -> f64 {
        const POINTS: usize = 10_001;
        let mut min = f64::INFINITY;
        for i in 0..POINTS {
            let u = -a + 2.0 * a * i as f64 / (POINTS - 1) as f64;
            min = min.min(self.deriv(u));
        }
        min
    }

    /// Contract checks: value at the origin vanishes (to within 1e-15) and
    /// the slope is positive at a spread of probe points.
    pub fn validate(&self) -> Result<()> {
        if let Activation::SmoothLeakyRelu { negative_slope: a } = self {
            if !(*a > 0.0 && *a < 1.0) {
                return Err(Error::Input(format!(
                    "smooth leaky ReLU slope must lie in (0,1), got {a}"
                )));
            }
        }
        if math::abs(self.value(0.0)) >= 1e-15 {
            return Err(Error::ActivationContract(format!(
                "{} does not vanish at the origin",
                self.name()
            )));
        }
        for probe in [-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0] {
            if !(self.deriv(probe) > 0.0) {
                return Err(Error::ActivationContract(format!(
                    "{} has non-positive slope at {probe}",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}
