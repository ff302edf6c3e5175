//! The objective abstraction and the built-in test objectives.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Ball;
use crate::math;

/// A nonnegative twice continuously differentiable objective with an analytic
/// gradient. Smoothness is a documented assumption, not a checked one;
/// nonnegativity is checked opportunistically by consumers.
///
/// Implementations must be pure: calls may be issued concurrently and must
/// be reentrant.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    /// A positive lower bound for `inf |grad f|^2 / f` over the ball (the
    /// exact infimum where a closed form exists), or `None` when the
    /// objective cannot certify one analytically.
    fn analytic_alpha(&self, ball: &Ball) -> Option<f64> {
        let _ = ball;
        None
    }

    /// `(L1, L2)`: a bound on first-partial magnitudes over the ball and on
    /// second-partial magnitudes over the ball of twice the radius.
    fn analytic_partial_bounds(&self, ball: &Ball) -> Option<(f64, f64)> {
        let _ = ball;
        None
    }
}

/// Diagonal quadratic `f(x) = sum_i c_i x_i^2` with strictly positive
/// coefficients.
#[derive(Debug, Clone)]
pub struct Quadratic {
    coefficients: Vec<f64>,
}

impl Quadratic {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Input("quadratic needs at least one coefficient".into()));
        }
        for c in &coefficients {
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::Input(format!(
                    "quadratic coefficients must be positive and finite, got {c}"
                )));
            }
        }
        Ok(Quadratic { coefficients })
    }

    /// `f(x) = |x|^2` in the given dimension.
    pub fn isotropic(dim: usize) -> Self {
        Quadratic {
            coefficients: vec![1.0; dim],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.coefficients.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(x.iter())
            .map(|(c, xi)| c * xi * xi)
            .sum()
    }

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        for ((g, c), xi) in grad.iter_mut().zip(self.coefficients.iter()).zip(x.iter()) {
            *g = 2.0 * c * xi;
        }
    }

    fn analytic_alpha(&self, _ball: &Ball) -> Option<f64> {
        // The ratio is sum 4 c_i^2 x_i^2 / sum c_i x_i^2, which lies in
        // [4 min c, 4 max c] everywhere and equals 4c for uniform
        // coefficients. 4 min c is a valid lower bound on any ball.
        let min_c = self
            .coefficients
            .iter()
            .fold(f64::INFINITY, |m, c| m.min(*c));
        Some(4.0 * min_c)
    }

    fn analytic_partial_bounds(&self, ball: &Ball) -> Option<(f64, f64)> {
        // Partial i is 2 c_i x_i; the Hessian is constant diag(2 c_i).
        let r = ball.radius();
        let l1 = ball
            .center()
            .iter()
            .zip(self.coefficients.iter())
            .map(|(x0, c)| 2.0 * c * (math::abs(*x0) + r))
            .fold(0.0f64, f64::max);
        let l2 = self
            .coefficients
            .iter()
            .map(|c| 2.0 * c)
            .fold(0.0f64, f64::max);
        Some((l1, l2))
    }
}

/// One-dimensional `f(x) = e^x`: positive everywhere, ratio `e^x`, useful as
/// a monotone test case where the ratio infimum sits at the left ball edge.
#[derive(Debug, Clone, Default)]
pub struct ExpObjective;

impl Objective for ExpObjective {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        math::exp(x[0])
    }

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        grad[0] = math::exp(x[0]);
    }

    fn analytic_alpha(&self, ball: &Ball) -> Option<f64> {
        Some(math::exp(ball.center()[0] - ball.radius()))
    }

    fn analytic_partial_bounds(&self, ball: &Ball) -> Option<(f64, f64)> {
        let c = ball.center()[0];
        let r = ball.radius();
        Some((math::exp(c + r), math::exp(c + 2.0 * r)))
    }
}
