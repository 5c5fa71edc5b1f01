//! Restricted isometry constants by exact support enumeration or sampling.
//!
//! For a matrix with unit-scaled columns, the order-K isometry constant is
//! the largest deviation of a K-column Gram submatrix spectrum from 1:
//! `delta_K = max_S max(lambda_max(G_S) - 1, 1 - lambda_min(G_S))` over all
//! supports `S` of size K. Exact mode enumerates every support in
//! colexicographic order, so the reported witness is deterministic (the
//! colexicographically smallest argmax).

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::sym_eigen;
use crate::mat::{dot, DenseMatrix};
use crate::{Error, Result};

/// Default cap on the number of supports exact enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// How a restricted isometry constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RipMode {
    /// Every support of the given order was examined.
    Exact,
    /// Only sampled supports were examined; the reported constant is a lower
    /// bound on the true one.
    SampledLowerBound,
}

/// Restricted isometry constant of one order, with the support achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct RipReport {
    /// Sparsity order K.
    pub order: usize,
    /// The measured constant (nonnegative).
    pub delta: f64,
    pub mode: RipMode,
    /// A support of size `order` achieving `delta`.
    pub witness_support: Vec<usize>,
    /// Number of supports examined; equals C(N, K) in exact mode.
    pub supports_examined: u64,
}

/// Binomial coefficient, saturating at `u128::MAX` on overflow.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Iterator over all size-k subsets of `0..n` in colexicographic order.
pub struct Supports {
    n: usize,
    k: usize,
    current: Option<Vec<usize>>,
}

/// All size-k subsets of `0..n`, colexicographically.
pub fn supports(n: usize, k: usize) -> Supports {
    let current = if k <= n { Some((0..k).collect()) } else { None };
    Supports { n, k, current }
}

impl Iterator for Supports {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        // Advance: bump the smallest element that has room, reset the prefix.
        let cur = self.current.as_mut().unwrap();
        let mut advanced = false;
        for i in 0..self.k {
            let limit = if i + 1 == self.k { self.n } else { cur[i + 1] };
            if cur[i] + 1 < limit {
                cur[i] += 1;
                for (j, slot) in cur.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

/// Gram matrix of the columns indexed by `support`.
fn gram_submatrix(cols: &[Vec<f64>], support: &[usize]) -> DenseMatrix {
    let k = support.len();
    DenseMatrix::from_fn(k, k, |p, q| dot(&cols[support[p]], &cols[support[q]]))
}

/// Spectral deviation of one support: how far the Gram eigenvalues stray
/// from 1 on either side.
fn support_deviation(cols: &[Vec<f64>], support: &[usize]) -> f64 {
    let eig = sym_eigen(&gram_submatrix(cols, support));
    let lambda_min = eig.values[0];
    let lambda_max = eig.values[eig.values.len() - 1];
    (lambda_max - 1.0).max(1.0 - lambda_min)
}

/// Exact order-K restricted isometry constant under the default enumeration
/// budget.
pub fn rip_exact(phi: &DenseMatrix, k: usize) -> Result<RipReport> {
    rip_exact_with_budget(phi, k, DEFAULT_ENUMERATION_BUDGET)
}

/// Exact order-K restricted isometry constant by enumerating all C(N, K)
/// supports.
///
/// Errors with [`Error::BudgetExceeded`] when the enumeration would visit
/// more supports than the budget; [`rip_sampled`] covers that regime with a
/// lower bound.
pub fn rip_exact_with_budget(phi: &DenseMatrix, k: usize, budget: u64) -> Result<RipReport> {
    let n = phi.cols();
    if k == 0 || k > n || k > phi.rows() {
        return Err(Error::BadDimensions);
    }
    let count = binomial(n, k);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { supports: count, budget });
    }
    let cols: Vec<Vec<f64>> = (0..n).map(|c| phi.column(c)).collect();
    let mut delta = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    for support in supports(n, k) {
        let dev = support_deviation(&cols, &support);
        if dev > delta {
            delta = dev;
            witness = support;
        }
    }
    Ok(RipReport {
        order: k,
        delta: delta.max(0.0),
        mode: RipMode::Exact,
        witness_support: witness,
        supports_examined: count as u64,
    })
}

/// Lower bound on the order-K restricted isometry constant from randomly
/// sampled supports.
///
/// Supports are drawn sequentially from one seeded stream, so for a fixed
/// seed the first T trials of a longer run coincide with a T-trial run and
/// the reported bound never decreases with more trials.
pub fn rip_sampled(phi: &DenseMatrix, k: usize, trials: u64, seed: u64) -> Result<RipReport> {
    let n = phi.cols();
    if k == 0 || k > n || k > phi.rows() {
        return Err(Error::BadDimensions);
    }
    if trials == 0 {
        return Err(Error::PreconditionViolated("sampling needs at least one trial"));
    }
    let cols: Vec<Vec<f64>> = (0..n).map(|c| phi.column(c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    for _ in 0..trials {
        let mut support = rand::seq::index::sample(&mut rng, n, k).into_vec();
        support.sort_unstable();
        let dev = support_deviation(&cols, &support);
        if dev > delta {
            delta = dev;
            witness = support;
        }
    }
    Ok(RipReport {
        order: k,
        delta: delta.max(0.0),
        mode: RipMode::SampledLowerBound,
        witness_support: witness,
        supports_examined: trials,
    })
}

/// Squared-norm bounds inherited by a matrix whose columns were
/// orthogonalized against a selected span: for isometry constant `delta` at
/// order K and a selection smaller than K, applying the orthogonalized
/// matrix to a disjointly supported sparse vector keeps its squared norm in
/// `[1 - delta/(1-delta), 1 + delta]` times the original.
pub fn modified_rip_bounds(delta: f64, k: usize, lambda_size: usize) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange);
    }
    if lambda_size >= k {
        return Err(Error::PreconditionViolated("selection must be smaller than the order"));
    }
    Ok((1.0 - delta / (1.0 - delta), 1.0 + delta))
}
