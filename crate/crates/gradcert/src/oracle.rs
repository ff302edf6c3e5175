//! Independent brute-force oracles: finite-difference gradients, grid
//! infima, and a dense symmetric eigensolver.
//!
//! These deliberately avoid the analytic code paths they are used to check.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dist, ensure_finite, norm, Ball, Matrix};
use crate::math;
use crate::objective::Objective;

/// Central-difference gradient: `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn fd_gradient(f: &dyn Objective, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Input(format!("step h must be positive and finite, got {h}")));
    }
    ensure_finite(x, "evaluation point")?;
    let mut probe = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let plus = f.value(&probe);
        probe[i] = x[i] - h;
        let minus = f.value(&probe);
        probe[i] = x[i];
        grad[i] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

/// Values of `f` below this are treated as exact zeros in ratio
/// computations, to keep `|grad|^2 / f` from overflowing.
pub const ZERO_LOSS_TOL: f64 = 1e-300;

/// Infimum of `|grad f|^2 / f` over a regular grid intersected with the
/// ball, skipping zeros of `f`. Returns `f64::INFINITY` when every grid
/// point was skipped. Supports dimensions 1 to 3; grids explode beyond that.
pub fn grid_alpha(f: &dyn Objective, ball: &Ball, resolution: usize) -> Result<f64> {
    let p = ball.dim();
    if p == 0 || p > 3 {
        return Err(Error::Unsupported(format!(
            "grid oracle supports dimensions 1 to 3, got {p}"
        )));
    }
    if resolution < 2 {
        return Err(Error::Input("grid resolution must be at least 2".into()));
    }
    let center = ball.center();
    let r = ball.radius();
    let coord = |axis: usize, idx: usize| -> f64 {
        center[axis] - r + 2.0 * r * idx as f64 / (resolution - 1) as f64
    };

    let mut best = f64::INFINITY;
    let mut x = vec![0.0; p];
    let mut grad = vec![0.0; p];
    let total = resolution.pow(p as u32);
    for flat in 0..total {
        let mut rest = flat;
        for axis in 0..p {
            x[axis] = coord(axis, rest % resolution);
            rest /= resolution;
        }
        if dist(&x, center) > r {
            continue;
        }
        let value = f.value(&x);
        if value <= ZERO_LOSS_TOL {
            continue;
        }
        f.gradient_into(&x, &mut grad);
        let g = norm(&grad);
        best = best.min(g * g / value);
    }
    Ok(best)
}

/// Extreme eigenvalues of a dense symmetric matrix by cyclic Jacobi
/// rotations, iterated until the off-diagonal Frobenius norm falls below
/// `1e-12` times the matrix norm.
///
/// Jacobi is slow past a few hundred rows but is reliable on the small,
/// possibly near-singular Gram matrices this crate produces, including the
/// smallest eigenvalue, which power-iteration schemes handle poorly.
pub fn min_eigen_sym(a: &Matrix) -> Result<(f64, f64)> {
    if !a.is_square() {
        return Err(Error::Input(format!(
            "eigensolver needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::Input("eigensolver needs at least a 1x1 matrix".into()));
    }
    if n > 2000 {
        return Err(Error::Unsupported(format!("matrix order {n} exceeds the 2000 cap")));
    }
    if !a.is_symmetric(1e-10) {
        return Err(Error::Input("matrix is not symmetric within 1e-10 relative".into()));
    }

    // Work on an exactly symmetrized copy.
    let mut w = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (w.get(i, j) + w.get(j, i));
            w.set(i, j, avg);
            w.set(j, i, avg);
        }
    }

    let norm_a = w.frobenius_norm().max(1e-300);
    let tol = 1e-12 * norm_a;
    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let v = m.get(i, j);
                    s += v * v;
                }
            }
        }
        math::sqrt(s)
    };

    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        if off(&w) < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = w.get(p, q);
                if math::abs(apq) < tol / (n as f64) {
                    continue;
                }
                let app = w.get(p, p);
                let aqq = w.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (math::abs(theta) + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;

                w.set(p, p, app - t * apq);
                w.set(q, q, aqq + t * apq);
                w.set(p, q, 0.0);
                w.set(q, p, 0.0);
                for k in 0..n {
                    if k != p && k != q {
                        let akp = w.get(k, p);
                        let akq = w.get(k, q);
                        let new_kp = c * akp - s * akq;
                        let new_kq = s * akp + c * akq;
                        w.set(k, p, new_kp);
                        w.set(p, k, new_kp);
                        w.set(k, q, new_kq);
                        w.set(q, k, new_kq);
                    }
                }
            }
        }
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let d = w.get(i, i);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{ExpObjective, Quadratic};

    #[test]
    fn fd_matches_derivative_of_square() {
        let q = Quadratic::isotropic(1);
        let g = fd_gradient(&q, &[1.0], 1e-5).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-9, "got {}", g[0]);
    }

    #[test]
    fn fd_constant_is_zero() {
        struct Const;
        impl Objective for Const {
            fn dim(&self) -> usize {
                2
            }
            fn value(&self, _x: &[f64]) -> f64 {
                3.5
            }
            fn gradient_into(&self, _x: &[f64], g: &mut [f64]) {
                g.fill(0.0);
            }
        }
        let g = fd_gradient(&Const, &[1.0, -2.0], 1e-5).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn fd_cubic_at_origin_cancels() {
        struct Cubic;
        impl Objective for Cubic {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, x: &[f64]) -> f64 {
                x[0] * x[0] * x[0]
            }
            fn gradient_into(&self, x: &[f64], g: &mut [f64]) {
                g[0] = 3.0 * x[0] * x[0];
            }
        }
        let h = 1e-5;
        let g = fd_gradient(&Cubic, &[0.0], h).unwrap();
        // central differences see (h^3 - (-h)^3)/2h = h^2
        assert!(g[0].abs() <= h * h * 1.0001, "got {}", g[0]);
    }

    #[test]
    fn fd_error_scales_quadratically() {
        // Richardson check on e^x at x = 0.3: error(h) ~ C h^2.
        let f = ExpObjective;
        let exact = math::exp(0.3);
        let err = |h: f64| (fd_gradient(&f, &[0.3], h).unwrap()[0] - exact).abs();
        let e1 = err(1e-3);
        let e2 = err(5e-4);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn grid_alpha_constant_ratio() {
        let q = Quadratic::isotropic(2);
        let ball = Ball::new(vec![2.0, 1.0], 0.5).unwrap();
        let a = grid_alpha(&q, &ball, 41).unwrap();
        assert!((a - 4.0).abs() < 1e-12, "got {a}");
    }

    #[test]
    fn grid_alpha_exp_left_edge() {
        let ball = Ball::new(vec![0.5], 1.0).unwrap();
        let a = grid_alpha(&ExpObjective, &ball, 10_000).unwrap();
        let exact = math::exp(-0.5);
        assert!((a - exact).abs() < 1e-3 * exact, "got {a}, exact {exact}");
    }

    #[test]
    fn grid_alpha_zero_function_is_sentinel() {
        struct Zero;
        impl Objective for Zero {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _x: &[f64]) -> f64 {
                0.0
            }
            fn gradient_into(&self, _x: &[f64], g: &mut [f64]) {
                g.fill(0.0);
            }
        }
        let ball = Ball::new(vec![0.0], 1.0).unwrap();
        assert_eq!(grid_alpha(&Zero, &ball, 100).unwrap(), f64::INFINITY);
    }

    #[test]
    fn grid_alpha_rejects_high_dimension() {
        let q = Quadratic::isotropic(4);
        let ball = Ball::new(vec![0.0; 4], 1.0).unwrap();
        assert!(matches!(
            grid_alpha(&q, &ball, 10),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn jacobi_identity_and_diagonal() {
        let id = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(min_eigen_sym(&id).unwrap(), (1.0, 1.0));
        let d = Matrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        assert_eq!(min_eigen_sym(&d).unwrap(), (1.0, 3.0));
    }

    #[test]
    fn jacobi_two_by_two_closed_form() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let (lo, hi) = min_eigen_sym(&m).unwrap();
        assert!((lo - 1.0).abs() < 1e-12);
        assert!((hi - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(min_eigen_sym(&m).is_err());
    }
}
