//! Dense row-major matrices and the handful of kernels the sampler and the
//! Lasso solver need.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Dense `rows x cols` matrix of `f64`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.data[i * size + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len("row-major buffer", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len("row length", cols, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("matvec operand", self.cols, x.len())?;
        Ok(self.row_iter().map(|row| dot(row, x)).collect())
    }

    /// `self^T * x`.
    pub fn tmatvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("transposed matvec operand", self.rows, x.len())?;
        let mut out = vec![0.0; self.cols];
        for (row, &xi) in self.row_iter().zip(x) {
            axpy(xi, row, &mut out);
        }
        Ok(out)
    }

    /// `self^T * self`, symmetric by construction.
    pub fn gram(&self) -> Matrix {
        let m = self.cols;
        let mut out = Matrix::zeros(m, m);
        for row in self.row_iter() {
            for (a, &ra) in row.iter().enumerate() {
                if ra == 0.0 {
                    continue;
                }
                axpy(ra, &row[a..], &mut out.data[a * m + a..(a + 1) * m]);
            }
        }
        for a in 0..m {
            for b in 0..a {
                out.data[a * m + b] = out.data[b * m + a];
            }
        }
        out
    }

    /// Columns `indices` of `self`, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.cols,
            });
        }
        Ok(Matrix::from_fn(self.rows, indices.len(), |i, k| {
            self.get(i, indices[k])
        }))
    }

    /// Largest eigenvalue of a symmetric positive semidefinite matrix, by
    /// power iteration.
    pub fn spectral_norm_psd(&self) -> f64 {
        let m = self.rows;
        if m == 0 {
            return 0.0;
        }
        let mut v: Vec<f64> = (0..m).map(|i| 1.0 + (i as f64 * 0.618).fract()).collect();
        let mut estimate = 0.0;
        let mut w = vec![0.0; m];
        for _ in 0..500 {
            let norm = dot(&v, &v).sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            symmetric_matvec_into(self, &v, &mut w);
            let next = dot(&v, &w);
            std::mem::swap(&mut v, &mut w);
            if (next - estimate).abs() <= 1e-12 * next.abs() {
                return next;
            }
            estimate = next;
        }
        estimate
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for lane in 0..8 {
            acc[lane] += x[lane] * y[lane];
        }
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// `y += a * x`.
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

/// `out = sym * x` for a symmetric matrix. Rows are contiguous and equal to
/// columns, so each output is a row dot product.
///
/// The summation order only depends on the inputs, so results are
/// reproducible bit for bit.
#[inline]
pub fn symmetric_matvec_into(sym: &Matrix, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(sym.rows, sym.cols);
    debug_assert_eq!(x.len(), sym.cols);
    out.iter_mut().for_each(|o| *o = 0.0);
    for (row, &xj) in sym.row_iter().zip(x) {
        axpy(xj, row, out);
    }
}
