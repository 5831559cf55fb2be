//! Dense row-major matrices and the few vector kernels the solvers need.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch(rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// A x.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "mul_vec: dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Aᵀ z.
    pub fn tr_mul_vec(&self, z: &[T]) -> Vec<T> {
        assert_eq!(z.len(), self.rows, "tr_mul_vec: dimension mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, &zi) in z.iter().enumerate() {
            if zi != T::zero() {
                axpy(zi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Largest eigenvalue of AᵀA by power iteration, stopped when successive
    /// estimates agree to `rel_tol`.
    pub fn top_gram_eigenvalue(&self, rel_tol: T, max_iter: usize) -> T {
        let scale = T::from_count(self.cols).sqrt().recip();
        // A fixed, non-degenerate start keeps the result deterministic.
        let mut v: Vec<T> =
            (0..self.cols).map(|j| scale * (T::one() + T::lit(0.5) * T::from_count(j % 7) / T::lit(7.0))).collect();
        let mut estimate = T::zero();
        for _ in 0..max_iter {
            let w = self.tr_mul_vec(&self.mul_vec(&v));
            let norm = norm2(&w);
            if norm == T::zero() {
                return T::zero();
            }
            let next = dot(&v, &w) / dot(&v, &v);
            v = w.into_iter().map(|x| x / norm).collect();
            if (next - estimate).abs() <= rel_tol * next {
                return next;
            }
            estimate = next;
        }
        estimate
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// y ← y + a x.
pub fn axpy<T: Real>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

/// ‖a − b‖₂.
pub fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y)).sqrt()
}

/// ‖x‖₀, counting exact zeros only.
pub fn support_size<T: Real>(x: &[T]) -> usize {
    x.iter().filter(|&&v| v != T::zero()).count()
}
