//! Dense linear algebra: Householder least squares, orthogonal projectors,
//! column orthogonalization, and a symmetric eigensolver.
//!
//! Least squares goes through an orthogonal factorization rather than the
//! normal equations so that residual orthogonality holds to near machine
//! precision; the normal equations exist only as a test oracle in
//! [`crate::oracles`].

// The factorization kernels index the packed matrix and vectors in lockstep.
#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use crate::mat::{abs, norm2, sqrt, validate_index_set, DenseMatrix};
use crate::{Error, Result};

/// Relative rank tolerance: a factorization diagonal below `RANK_TOL` times
/// the largest diagonal flags the selected columns as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Packed Householder QR factorization of an M x k matrix, k <= M.
///
/// Column `j` of `packed` stores the transformed upper-triangular entries in
/// rows `0..j` and the unnormalized reflector vector in rows `j..m`; the
/// diagonal of the triangular factor lives in `r_diag`.
pub(crate) struct HouseholderQr {
    m: usize,
    k: usize,
    packed: DenseMatrix,
    tau: Vec<f64>,
    pub(crate) r_diag: Vec<f64>,
}

impl HouseholderQr {
    pub(crate) fn factor(a: &DenseMatrix) -> Result<Self> {
        let (m, k) = (a.rows(), a.cols());
        if k > m {
            return Err(Error::BadDimensions);
        }
        let mut packed = a.clone();
        let mut tau = vec![0.0; k];
        let mut r_diag = vec![0.0; k];
        for j in 0..k {
            let mut col_sq = 0.0;
            for i in j..m {
                let v = packed[(i, j)];
                col_sq += v * v;
            }
            let norm_x = sqrt(col_sq);
            if norm_x == 0.0 {
                // Zero column below the diagonal: no reflection, rank check
                // will reject it.
                continue;
            }
            let alpha = packed[(j, j)];
            let beta = if alpha >= 0.0 { -norm_x } else { norm_x };
            let v0 = alpha - beta;
            let rest_sq = col_sq - alpha * alpha;
            tau[j] = 2.0 / (rest_sq + v0 * v0);
            r_diag[j] = beta;
            packed[(j, j)] = v0;
            for c in j + 1..k {
                let mut s = 0.0;
                for i in j..m {
                    s += packed[(i, j)] * packed[(i, c)];
                }
                s *= tau[j];
                for i in j..m {
                    let vij = packed[(i, j)];
                    packed[(i, c)] -= s * vij;
                }
            }
        }
        Ok(Self { m, k, packed, tau, r_diag })
    }

    pub(crate) fn rank_ok(&self) -> bool {
        let mut max = 0.0_f64;
        let mut min = f64::INFINITY;
        for &d in &self.r_diag {
            let a = abs(d);
            if a > max {
                max = a;
            }
            if a < min {
                min = a;
            }
        }
        max > 0.0 && min > RANK_TOL * max
    }

    /// Applies Qᵀ in place to a length-m vector.
    pub(crate) fn apply_qt(&self, y: &mut [f64]) {
        debug_assert_eq!(y.len(), self.m);
        for j in 0..self.k {
            if self.tau[j] == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for i in j..self.m {
                s += self.packed[(i, j)] * y[i];
            }
            s *= self.tau[j];
            for i in j..self.m {
                y[i] -= s * self.packed[(i, j)];
            }
        }
    }

    /// Applies Q in place to a length-m vector.
    pub(crate) fn apply_q(&self, y: &mut [f64]) {
        debug_assert_eq!(y.len(), self.m);
        for j in (0..self.k).rev() {
            if self.tau[j] == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for i in j..self.m {
                s += self.packed[(i, j)] * y[i];
            }
            s *= self.tau[j];
            for i in j..self.m {
                y[i] -= s * self.packed[(i, j)];
            }
        }
    }

    /// Back substitution against the triangular factor; `z` has length >= k.
    pub(crate) fn solve_upper(&self, z: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut c = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = z[i];
            for j in i + 1..k {
                s -= self.packed[(i, j)] * c[j];
            }
            c[i] = s / self.r_diag[i];
        }
        c
    }

    /// The first k columns of Q as an explicit M x k matrix.
    pub(crate) fn thin_q(&self) -> DenseMatrix {
        let mut q = DenseMatrix::zeros(self.m, self.k);
        let mut col = vec![0.0; self.m];
        for j in 0..self.k {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[j] = 1.0;
            self.apply_q(&mut col);
            for i in 0..self.m {
                q[(i, j)] = col[i];
            }
        }
        q
    }
}

/// Solution of `min ||y - A c||`, with the achieved residual.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// Minimizing coefficients, one per column of `A`.
    pub coeffs: Vec<f64>,
    /// Residual vector `y - A c`.
    pub residual: Vec<f64>,
    /// Euclidean norm of the residual.
    pub residual_norm: f64,
}

/// Solves the least squares problem for a full-column-rank M x k matrix,
/// k <= M, via Householder QR.
///
/// The residual is recomputed as `y - A c`, so it is orthogonal to the
/// columns of `A` to roughly `RANK_TOL` relative accuracy. Returns
/// [`Error::RankDeficient`] when the smallest factorization diagonal falls
/// below `RANK_TOL` times the largest, which signals that the caller selected
/// linearly dependent columns.
pub fn least_squares(a: &DenseMatrix, y: &[f64]) -> Result<LeastSquares> {
    if y.len() != a.rows() {
        return Err(Error::BadDimensions);
    }
    let qr = HouseholderQr::factor(a)?;
    if !qr.rank_ok() {
        return Err(Error::RankDeficient);
    }
    let mut qty = y.to_vec();
    qr.apply_qt(&mut qty);
    let coeffs = qr.solve_upper(&qty);
    let ax = a.matvec(&coeffs);
    let residual: Vec<f64> = y.iter().zip(&ax).map(|(yi, ai)| yi - ai).collect();
    let residual_norm = norm2(&residual);
    Ok(LeastSquares { coeffs, residual, residual_norm })
}

/// Orthogonal projector onto the span of a column selection.
#[derive(Debug, Clone)]
pub struct Projector {
    /// The selected column indices, strictly increasing.
    pub basis_indices: Vec<usize>,
    /// The M x M projector matrix; idempotent and symmetric.
    pub matrix: DenseMatrix,
}

/// Projector onto the span of the columns of `phi` indexed by `lambda`.
///
/// Built as `Q₁ Q₁ᵀ` from a Householder factorization of the selected
/// columns, never through an explicit inverse. An empty `lambda` yields the
/// zero matrix (projection onto the trivial subspace).
pub fn projector(phi: &DenseMatrix, lambda: &[usize]) -> Result<Projector> {
    validate_index_set(lambda, phi.cols())?;
    if lambda.is_empty() {
        return Ok(Projector {
            basis_indices: Vec::new(),
            matrix: DenseMatrix::zeros(phi.rows(), phi.rows()),
        });
    }
    if lambda.len() > phi.rows() {
        return Err(Error::BadDimensions);
    }
    let sub = phi.select_columns(lambda)?;
    let qr = HouseholderQr::factor(&sub)?;
    if !qr.rank_ok() {
        return Err(Error::RankDeficient);
    }
    let q1 = qr.thin_q();
    let matrix = q1.matmul(&q1.transpose());
    Ok(Projector { basis_indices: lambda.to_vec(), matrix })
}

/// Orthogonalizes every column of `phi` against the span of the columns
/// indexed by `lambda`, i.e. applies the complementary projector.
///
/// Columns indexed by `lambda` come out (numerically) zero. An empty
/// `lambda` returns `phi` unchanged.
pub fn orthogonalized_matrix(phi: &DenseMatrix, lambda: &[usize]) -> Result<DenseMatrix> {
    validate_index_set(lambda, phi.cols())?;
    if lambda.is_empty() {
        return Ok(phi.clone());
    }
    if lambda.len() > phi.rows() {
        return Err(Error::BadDimensions);
    }
    let sub = phi.select_columns(lambda)?;
    let qr = HouseholderQr::factor(&sub)?;
    if !qr.rank_ok() {
        return Err(Error::RankDeficient);
    }
    let q1 = qr.thin_q();
    // A = Phi - Q1 (Q1ᵀ Phi)
    let qt_phi = q1.transpose().matmul(phi);
    Ok(phi.sub(&q1.matmul(&qt_phi)))
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Matching eigenvectors as columns, orthonormal.
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Operates on the
/// symmetric part of the input; accuracy is near machine precision for the
/// small Gram matrices this crate produces.
pub fn sym_eigen(a: &DenseMatrix) -> SymEigen {
    assert_eq!(a.rows(), a.cols(), "sym_eigen needs a square matrix");
    let n = a.rows();
    let mut m = DenseMatrix::from_fn(n, n, |r, c| 0.5 * (a[(r, c)] + a[(c, r)]));
    let mut v = DenseMatrix::identity(n);
    let frob = m.frobenius_norm();
    if frob > 0.0 {
        for _sweep in 0..100 {
            let mut off_sq = 0.0;
            for p in 0..n {
                for q in 0..n {
                    if p != q {
                        let x = m[(p, q)];
                        off_sq += x * x;
                    }
                }
            }
            if sqrt(off_sq) <= 1e-14 * frob {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + sqrt(1.0 + theta * theta))
                    } else {
                        1.0 / (theta - sqrt(1.0 + theta * theta))
                    };
                    let c = 1.0 / sqrt(1.0 + t * t);
                    let s = t * c;
                    for i in 0..n {
                        let mip = m[(i, p)];
                        let miq = m[(i, q)];
                        m[(i, p)] = c * mip - s * miq;
                        m[(i, q)] = s * mip + c * miq;
                    }
                    for i in 0..n {
                        let mpi = m[(p, i)];
                        let mqi = m[(q, i)];
                        m[(p, i)] = c * mpi - s * mqi;
                        m[(q, i)] = s * mpi + c * mqi;
                    }
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = c * vip - s * viq;
                        v[(i, q)] = s * vip + c * viq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap().then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymEigen { values, vectors }
}
