//! Vectors, balls, and a minimal dense matrix.
//!
//! Vectors are plain `&[f64]` slices; the problem sizes here (parameter
//! counts in the tens to hundreds, Gram matrices up to a few hundred rows)
//! do not justify a linear-algebra dependency, and the eigensolver lives in
//! [`crate::oracle`] anyway.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Euclidean norm without input validation. Callers own finiteness.
pub fn norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

/// Euclidean norm with finiteness validation.
pub fn euclidean_norm(v: &[f64]) -> Result<f64> {
    ensure_finite(v, "vector")?;
    Ok(norm(v))
}

/// Euclidean distance between two equal-length slices.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    math::sqrt(
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum(),
    )
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `y += scale * x`.
pub fn axpy(scale: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += scale * xi;
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
}

pub(crate) fn ensure_finite(v: &[f64], what: &str) -> Result<()> {
    for (i, x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::Input(format!("{what} has non-finite entry at index {i}")));
        }
    }
    Ok(())
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        ensure_finite(&center, "ball center")?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Input(format!("ball radius must be positive and finite, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Same center, radius scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Ball {
        Ball {
            center: self.center.clone(),
            radius: self.radius * factor,
        }
    }

    /// Closed-ball membership: `|x - center| <= radius`.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.center.len() {
            return Err(Error::Input(format!(
                "dimension mismatch: ball has dimension {}, point has {}",
                self.center.len(),
                x.len()
            )));
        }
        ensure_finite(x, "point")?;
        Ok(dist(x, &self.center) <= self.radius)
    }
}

/// Dense row-major matrix. Only what the Gram/eigen computations need.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input(String::from("matrix needs at least one row")));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Input(String::from("ragged rows in matrix literal")));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(&self.data)
    }

    /// Symmetric within `rel_tol` relative to the largest entry magnitude.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs_entry().max(1e-300);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if math::abs(self.get(i, j) - self.get(j, i)) > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_pythagorean() {
        assert_eq!(euclidean_norm(&[3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn norm_zero_vector() {
        assert_eq!(euclidean_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn norm_ones() {
        assert_eq!(euclidean_norm(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn norm_rejects_non_finite() {
        assert!(euclidean_norm(&[1.0, f64::NAN]).is_err());
        assert!(euclidean_norm(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn ball_contains_center_and_boundary() {
        let b = Ball::new(vec![1.0, 2.0], 0.5).unwrap();
        assert!(b.contains(&[1.0, 2.0]).unwrap());
        // boundary point at distance exactly equal to the radius
        assert!(b.contains(&[1.5, 2.0]).unwrap());
    }

    #[test]
    fn ball_excludes_sqrt2_point() {
        let b = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        assert!(!b.contains(&[1.0, 1.0]).unwrap());
    }

    #[test]
    fn ball_rejects_dimension_mismatch() {
        let b = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        assert!(b.contains(&[1.0]).is_err());
    }

    #[test]
    fn ball_rejects_bad_radius() {
        assert!(Ball::new(vec![0.0], 0.0).is_err());
        assert!(Ball::new(vec![0.0], -1.0).is_err());
        assert!(Ball::new(vec![0.0], f64::NAN).is_err());
    }

    #[test]
    fn matrix_symmetry_check() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(m.is_symmetric(1e-12));
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.1, 2.0]]).unwrap();
        assert!(!m.is_symmetric(1e-10));
    }
}
