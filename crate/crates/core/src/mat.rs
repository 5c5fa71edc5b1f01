//! Dense row-major matrices and small vector helpers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Dense real matrix.
///
/// Entries are stored row-major in a single contiguous buffer: entry `(r, c)`
/// lives at `data[r * cols + c]`. All entries are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting empty dimensions,
    /// length mismatches, and non-finite values.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadDimensions);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix by evaluating `f(r, c)`. Panics on empty dimensions or
    /// non-finite output; callers that can produce non-finite values should
    /// go through [`DenseMatrix::from_rows`].
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        assert!(data.iter().all(|v| v.is_finite()), "matrix entries must be finite");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `r` as a contiguous slice.
    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copy of column `c`.
    pub fn column(&self, c: usize) -> Vec<f64> {
        assert!(c < self.cols);
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    /// Row-major view of all entries.
    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// Submatrix formed by the columns in `idx`, which must be strictly
    /// increasing and in bounds.
    pub fn select_columns(&self, idx: &[usize]) -> Result<DenseMatrix> {
        validate_index_set(idx, self.cols)?;
        if idx.is_empty() {
            return Err(Error::BadDimensions);
        }
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            let row = self.row(r);
            for &c in idx {
                data.push(row[c]);
            }
        }
        Ok(DenseMatrix { rows: self.rows, cols: idx.len(), data })
    }

    /// `A x` for a vector of length `cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    /// `Aᵀ y` for a vector of length `rows`.
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows, "matvec_t dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                for (o, &a) in out.iter_mut().zip(self.row(r)) {
                    *o += yr * a;
                }
            }
        }
        out
    }

    /// `A B`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik != 0.0 {
                    let src = rhs.row(k);
                    let dst = out.row_mut(i);
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d += aik * s;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self.data[c * self.cols + r])
    }

    /// Elementwise difference `A - B`.
    pub fn sub(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "sub dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn column_norm(&self, c: usize) -> f64 {
        assert!(c < self.cols);
        let mut acc = 0.0;
        for r in 0..self.rows {
            let v = self.data[r * self.cols + c];
            acc += v * v;
        }
        sqrt(acc)
    }

    pub(crate) fn scale_column(&mut self, c: usize, s: f64) {
        for r in 0..self.rows {
            self.data[r * self.cols + c] *= s;
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Checks that `idx` is strictly increasing with every entry below `bound`.
pub(crate) fn validate_index_set(idx: &[usize], bound: usize) -> Result<()> {
    for (pos, &i) in idx.iter().enumerate() {
        if i >= bound || (pos > 0 && idx[pos - 1] >= i) {
            return Err(Error::InvalidIndexSet);
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    num_traits::Float::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    num_traits::Float::abs(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    num_traits::Float::log2(x)
}

/// Inner product of two equal-length slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm2(a: &[f64]) -> f64 {
    sqrt(a.iter().map(|x| x * x).sum())
}

/// Maximum absolute entry (0 for an empty slice).
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, &x| if abs(x) > m { abs(x) } else { m })
}
