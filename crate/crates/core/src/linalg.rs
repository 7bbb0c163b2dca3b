//! Small dense matrix/vector helpers.
//!
//! Everything is `f64` and row-major; the toolkit's networks and worlds are
//! tiny, so plain loops beat pulling in a linear algebra stack.

use serde::{Deserialize, Serialize};

use crate::error::{EditKitError, Result};

/// Dense row-major matrix. A column vector is a `rows x 1` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(EditKitError::Shape(format!(
                "expected {}x{}={} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[f64]) -> Self {
        Mat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Contiguous storage for rows `r0..r1` (row-major layout).
    pub fn row_block(&self, r0: usize, r1: usize) -> &[f64] {
        &self.data[r0 * self.cols..r1 * self.cols]
    }

    pub fn row_block_mut(&mut self, r0: usize, r1: usize) -> &mut [f64] {
        &mut self.data[r0 * self.cols..r1 * self.cols]
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(EditKitError::Shape(format!(
                "matvec: {}x{} matrix with input of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[r] = acc;
        }
        Ok(y)
    }

    /// y = A^T v
    pub fn matvec_t(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(EditKitError::Shape(format!(
                "matvec_t: {}x{} matrix with input of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut y = vec![0.0; self.cols];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let vr = v[r];
            for (yc, a) in y.iter_mut().zip(row.iter()) {
                *yc += a * vr;
            }
        }
        Ok(y)
    }

    /// self += scale * (u v^T)
    pub fn add_outer(&mut self, u: &[f64], v: &[f64], scale: f64) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for r in 0..self.rows {
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            let ur = scale * u[r];
            for (a, b) in row.iter_mut().zip(v.iter()) {
                *a += ur * b;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity.
///
/// Bitwise-identical inputs return exactly 1.0 (the mathematical value),
/// avoiding the one-ulp wobble of `x / (sqrt(x) * sqrt(x))`. Zero vectors
/// return 0.0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    if a == b {
        if a.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        return 1.0;
    }
    let na = norm2(a);
    let nb = norm2(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

pub fn add_scaled(into: &mut [f64], v: &[f64], scale: f64) {
    for (a, b) in into.iter_mut().zip(v.iter()) {
        *a += scale * b;
    }
}
