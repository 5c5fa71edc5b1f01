//! Sensing-matrix ensembles, sparse test signals, coherence, and restricted
//! isometry constants (see [`rip`]).
//!
//! Generators are deterministic functions of their seed and exist as test
//! instrumentation: the recovery guarantees checked elsewhere are worst-case
//! over signals, so no particular value distribution is privileged.

pub mod rip;

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::HouseholderQr;
use crate::mat::{abs, dot, norm2, norm_inf, sqrt, validate_index_set, DenseMatrix};
use crate::{Error, Result};

pub use rip::{
    binomial, modified_rip_bounds, rip_exact, rip_exact_with_budget, rip_sampled, supports,
    RipMode, RipReport, Supports, DEFAULT_ENUMERATION_BUDGET,
};

/// A sparse vector given by its support and the values on it.
///
/// The support is strictly increasing, 0-based, and every stored value is
/// nonzero and finite; the sparsity level is the support size.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    dimension: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSignal {
    pub fn new(dimension: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if dimension == 0 || support.len() > dimension {
            return Err(Error::BadDimensions);
        }
        if values.len() != support.len() {
            return Err(Error::BadDimensions);
        }
        validate_index_set(&support, dimension)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if values.contains(&0.0) {
            return Err(Error::PreconditionViolated("sparse signal values must be nonzero"));
        }
        Ok(Self { dimension, support, values })
    }

    /// The zero signal in the given dimension.
    pub fn zero(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::BadDimensions);
        }
        Ok(Self { dimension, support: Vec::new(), values: Vec::new() })
    }

    /// Builds a signal from a dense vector, taking exactly the nonzero
    /// entries as the support.
    pub fn from_dense(dense: &[f64]) -> Result<Self> {
        if dense.is_empty() {
            return Err(Error::BadDimensions);
        }
        if dense.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut support = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                support.push(i);
                values.push(v);
            }
        }
        Ok(Self { dimension: dense.len(), support, values })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[inline]
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sparsity level: the number of nonzero entries.
    #[inline]
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.values)
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.values)
    }

    /// Copy of the signal with every entry indexed by `lambda` zeroed, i.e.
    /// the part of the signal not yet explained by that support estimate.
    pub fn masked_off(&self, lambda: &[usize]) -> SparseSignal {
        let mut support = Vec::new();
        let mut values = Vec::new();
        for (&i, &v) in self.support.iter().zip(&self.values) {
            if !lambda.contains(&i) {
                support.push(i);
                values.push(v);
            }
        }
        SparseSignal { dimension: self.dimension, support, values }
    }

    /// True when the support does not intersect `lambda`.
    pub fn disjoint_from(&self, lambda: &[usize]) -> bool {
        self.support.iter().all(|i| !lambda.contains(i))
    }
}

/// Signal entries reordered by descending magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedMagnitudes {
    /// Signed entries, `|sorted[0]| >= |sorted[1]| >= ...`; entries past the
    /// sparsity level are implicitly zero.
    pub sorted: Vec<f64>,
    /// Original (0-based) index of each sorted entry.
    pub permutation: Vec<usize>,
}

/// Orders the entries of a sparse signal by descending magnitude, breaking
/// magnitude ties by ascending original index.
pub fn ordered_magnitudes(x: &SparseSignal) -> OrderedMagnitudes {
    let mut pairs: Vec<(usize, f64)> = x
        .support
        .iter()
        .copied()
        .zip(x.values.iter().copied())
        .collect();
    pairs.sort_by(|a, b| {
        abs(b.1)
            .partial_cmp(&abs(a.1))
            .unwrap()
            .then(a.0.cmp(&b.0))
    });
    OrderedMagnitudes {
        sorted: pairs.iter().map(|p| p.1).collect(),
        permutation: pairs.iter().map(|p| p.0).collect(),
    }
}

/// Matrix ensembles for [`gen_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    /// I.i.d. normal entries scaled by `1/sqrt(M)`.
    Gaussian,
    /// Entries `+-1/sqrt(M)`, equiprobable.
    Bernoulli,
    /// A random N x N orthogonal matrix times `I + eps * E` with `E` i.i.d.
    /// normal, columns renormalized to unit length. At `eps = 0` the columns
    /// are exactly orthonormal; small `eps` manufactures matrices with small
    /// exact isometry constants.
    IdentityPerturbed { eps: f64 },
    /// Passes the given entries through unchanged.
    Explicit(DenseMatrix),
}

/// Draws an M x N sensing matrix from the ensemble, deterministically for a
/// fixed seed.
pub fn gen_matrix(ensemble: &Ensemble, m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::BadDimensions);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match ensemble {
        Ensemble::Gaussian => {
            let scale = 1.0 / sqrt(m as f64);
            let mut data = Vec::with_capacity(m * n);
            for _ in 0..m * n {
                let z: f64 = rng.sample(StandardNormal);
                data.push(scale * z);
            }
            DenseMatrix::from_rows(m, n, data)
        }
        Ensemble::Bernoulli => {
            let scale = 1.0 / sqrt(m as f64);
            let mut data = Vec::with_capacity(m * n);
            for _ in 0..m * n {
                data.push(if rng.random::<bool>() { scale } else { -scale });
            }
            DenseMatrix::from_rows(m, n, data)
        }
        Ensemble::IdentityPerturbed { eps } => {
            if m != n || *eps < 0.0 || !eps.is_finite() {
                return Err(Error::BadDimensions);
            }
            let q = random_orthogonal(n, &mut rng)?;
            // B = I + eps * E
            let b = {
                let mut data = Vec::with_capacity(n * n);
                for r in 0..n {
                    for c in 0..n {
                        let z: f64 = rng.sample(StandardNormal);
                        data.push(if r == c { 1.0 } else { 0.0 } + eps * z);
                    }
                }
                DenseMatrix::from_rows(n, n, data)?
            };
            let mut phi = q.matmul(&b);
            for c in 0..n {
                let norm = phi.column_norm(c);
                if norm == 0.0 {
                    return Err(Error::ZeroVector);
                }
                phi.scale_column(c, 1.0 / norm);
            }
            Ok(phi)
        }
        Ensemble::Explicit(entries) => {
            if entries.rows() != m || entries.cols() != n {
                return Err(Error::BadDimensions);
            }
            Ok(entries.clone())
        }
    }
}

/// Haar-ish random orthogonal matrix: QR of a standard normal matrix with the
/// sign convention that the triangular diagonal is positive.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Result<DenseMatrix> {
    for _attempt in 0..16 {
        let g = DenseMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let qr = HouseholderQr::factor(&g)?;
        if !qr.rank_ok() {
            continue;
        }
        let mut q = qr.thin_q();
        for (j, &d) in qr.r_diag.iter().enumerate() {
            if d < 0.0 {
                q.scale_column(j, -1.0);
            }
        }
        return Ok(q);
    }
    Err(Error::RankDeficient)
}

/// Value distributions for [`gen_sparse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueDist {
    Gaussian,
    UnitSigns,
}

/// Draws a K-sparse signal with a uniformly random support.
pub fn gen_sparse(n: usize, k: usize, dist: ValueDist, seed: u64) -> Result<SparseSignal> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::BadDimensions);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support = rand::seq::index::sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    let values = (0..k).map(|_| draw_value(dist, &mut rng)).collect();
    SparseSignal::new(n, support, values)
}

fn draw_value(dist: ValueDist, rng: &mut ChaCha8Rng) -> f64 {
    match dist {
        ValueDist::Gaussian => loop {
            let z: f64 = rng.sample(StandardNormal);
            if z != 0.0 {
                return z;
            }
        },
        ValueDist::UnitSigns => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Draws a K-sparse signal whose magnitudes, ordered descending, decay by at
/// least a factor `alpha` between consecutive entries.
///
/// Construction: the smallest magnitude is drawn in `[1, 2)` and each larger
/// one multiplies the previous by `alpha` and a random upward factor in
/// `[1, 1.5)`, so the ratio condition holds by construction. Signs and the
/// placement of the magnitudes over a uniformly random support are random.
pub fn gen_decaying(n: usize, k: usize, alpha: f64, seed: u64) -> Result<SparseSignal> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::BadDimensions);
    }
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::PreconditionViolated("decay ratio must exceed 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support = rand::seq::index::sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    // Magnitudes from smallest to largest.
    let mut mags = vec![0.0; k];
    mags[k - 1] = 1.0 + rng.random::<f64>();
    for j in (0..k.saturating_sub(1)).rev() {
        mags[j] = mags[j + 1] * alpha * (1.0 + 0.5 * rng.random::<f64>());
    }
    if mags.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFinite);
    }
    // Scatter the magnitudes over the support in random order, random signs.
    let placement = rand::seq::index::sample(&mut rng, k, k).into_vec();
    let mut values = vec![0.0; k];
    for (mag_pos, &slot) in placement.iter().enumerate() {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        values[slot] = sign * mags[mag_pos];
    }
    SparseSignal::new(n, support, values)
}

/// Maximum absolute inner product between distinct columns.
///
/// Requires unit-norm columns (within `1e-8`), the regime in which the
/// coherence recovery condition is stated.
pub fn coherence(phi: &DenseMatrix) -> Result<f64> {
    for c in 0..phi.cols() {
        if abs(phi.column_norm(c) - 1.0) > 1e-8 {
            return Err(Error::ColumnsNotNormalized);
        }
    }
    let cols: Vec<Vec<f64>> = (0..phi.cols()).map(|c| phi.column(c)).collect();
    let mut mu = 0.0_f64;
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let ip = abs(dot(&cols[i], &cols[j]));
            if ip > mu {
                mu = ip;
            }
        }
    }
    Ok(mu)
}

/// Rescales every column to unit norm. Errors on an exactly zero column.
pub fn normalize_columns(phi: &DenseMatrix) -> Result<DenseMatrix> {
    let mut out = phi.clone();
    for c in 0..out.cols() {
        let norm = out.column_norm(c);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        out.scale_column(c, 1.0 / norm);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sparse_signal_validation() {
        assert!(SparseSignal::new(5, vec![0, 2], vec![1.0, -2.0]).is_ok());
        assert_eq!(
            SparseSignal::new(5, vec![2, 0], vec![1.0, 1.0]).unwrap_err(),
            Error::InvalidIndexSet
        );
        assert_eq!(
            SparseSignal::new(5, vec![0, 5], vec![1.0, 1.0]).unwrap_err(),
            Error::InvalidIndexSet
        );
        assert!(matches!(
            SparseSignal::new(5, vec![0], vec![0.0]).unwrap_err(),
            Error::PreconditionViolated(_)
        ));
        assert_eq!(
            SparseSignal::new(5, vec![0], vec![1.0, 2.0]).unwrap_err(),
            Error::BadDimensions
        );
    }

    #[test]
    fn masked_off_drops_lambda_entries() {
        let x = SparseSignal::new(6, vec![1, 3, 5], vec![1.0, 2.0, 3.0]).unwrap();
        let masked = x.masked_off(&[3]);
        assert_eq!(masked.support(), &[1, 5]);
        assert_eq!(masked.values(), &[1.0, 3.0]);
        assert!(masked.disjoint_from(&[3]));
        assert!(!x.disjoint_from(&[3]));
    }

    #[test]
    fn ordered_magnitudes_basic() {
        let x = SparseSignal::new(10, vec![1, 4, 8], vec![-3.0, 1.0, 2.0]).unwrap();
        let om = ordered_magnitudes(&x);
        assert_eq!(om.sorted, vec![-3.0, 2.0, 1.0]);
        assert_eq!(om.permutation, vec![1, 8, 4]);
        // Empty support: empty ordering.
        let zero = SparseSignal::zero(4).unwrap();
        let om0 = ordered_magnitudes(&zero);
        assert!(om0.sorted.is_empty() && om0.permutation.is_empty());
    }

    #[test]
    fn ordered_magnitudes_ties_by_index() {
        let x = SparseSignal::new(6, vec![0, 2, 5], vec![2.0, -2.0, 2.0]).unwrap();
        let om = ordered_magnitudes(&x);
        assert_eq!(om.permutation, vec![0, 2, 5]);
    }

    #[test]
    fn ordered_magnitudes_roundtrip() {
        let x = gen_sparse(12, 5, ValueDist::Gaussian, 77).unwrap();
        let om = ordered_magnitudes(&x);
        let mut dense = vec![0.0; 12];
        for (pos, &idx) in om.permutation.iter().enumerate() {
            dense[idx] = om.sorted[pos];
        }
        assert_eq!(dense, x.to_dense());
    }

    #[test]
    fn gen_matrix_is_deterministic() {
        let a = gen_matrix(&Ensemble::Gaussian, 4, 6, 7).unwrap();
        let b = gen_matrix(&Ensemble::Gaussian, 4, 6, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_matrix(&Ensemble::Gaussian, 4, 6, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bernoulli_entries_are_scaled_signs() {
        let m = gen_matrix(&Ensemble::Bernoulli, 8, 5, 3).unwrap();
        let s = 1.0 / 8f64.sqrt();
        for &v in m.entries() {
            assert!(v == s || v == -s);
        }
    }

    #[test]
    fn identity_perturbed_zero_eps_is_orthonormal() {
        let phi = gen_matrix(&Ensemble::IdentityPerturbed { eps: 0.0 }, 5, 5, 11).unwrap();
        let g = phi.transpose().matmul(&phi);
        assert!(g.sub(&DenseMatrix::identity(5)).frobenius_norm() <= 1e-12);
        // Exactly orthonormal columns: the isometry constant vanishes at
        // every order.
        for k in 1..=4 {
            assert!(rip::rip_exact(&phi, k).unwrap().delta <= 1e-12);
        }
    }

    #[test]
    fn identity_perturbed_requires_square() {
        assert_eq!(
            gen_matrix(&Ensemble::IdentityPerturbed { eps: 0.1 }, 4, 5, 1).unwrap_err(),
            Error::BadDimensions
        );
    }

    #[test]
    fn gen_matrix_rejects_empty_dims() {
        assert_eq!(gen_matrix(&Ensemble::Gaussian, 0, 4, 1).unwrap_err(), Error::BadDimensions);
    }

    #[test]
    fn gen_sparse_full_support() {
        let x = gen_sparse(4, 4, ValueDist::Gaussian, 9).unwrap();
        assert_eq!(x.support(), &[0, 1, 2, 3]);
        assert_eq!(gen_sparse(4, 4, ValueDist::Gaussian, 9).unwrap(), x);
    }

    #[test]
    fn gen_sparse_support_frequencies_are_binomial() {
        // Each index should appear with frequency K/N within 3 sigma.
        let (n, k, draws) = (6usize, 2usize, 10_000usize);
        let mut counts = vec![0usize; n];
        for t in 0..draws {
            let x = gen_sparse(n, k, ValueDist::UnitSigns, t as u64).unwrap();
            for &i in x.support() {
                counts[i] += 1;
            }
        }
        let p = k as f64 / n as f64;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        for &c in &counts {
            let freq = c as f64 / draws as f64;
            assert!(
                (freq - p).abs() <= 3.0 * sigma,
                "support frequency {freq} outside binomial band around {p}"
            );
        }
    }

    #[test]
    fn gen_decaying_satisfies_ratio() {
        for seed in 0..50 {
            let x = gen_decaying(10, 3, 2.0, seed).unwrap();
            let om = ordered_magnitudes(&x);
            for j in 0..om.sorted.len() - 1 {
                assert!(om.sorted[j].abs() >= 2.0 * om.sorted[j + 1].abs());
                assert!(om.sorted[j].abs() >= om.sorted[j + 1].abs());
            }
        }
        // Single nonzero: condition vacuous.
        let x1 = gen_decaying(5, 1, 4.0, 0).unwrap();
        assert_eq!(x1.sparsity(), 1);
        assert!(gen_decaying(5, 2, 1.0, 0).is_err());
    }

    #[test]
    fn coherence_identity_and_pair() {
        assert_eq!(coherence(&DenseMatrix::identity(4)).unwrap(), 0.0);
        // Two unit columns at 45 degrees: inner product 1/sqrt(2).
        let s = 1.0 / 2f64.sqrt();
        let phi = DenseMatrix::from_rows(2, 2, vec![1.0, s, 0.0, s]).unwrap();
        assert_abs_diff_eq!(coherence(&phi).unwrap(), s, epsilon = 1e-12);
    }

    #[test]
    fn coherence_requires_unit_columns() {
        let phi = DenseMatrix::from_rows(2, 2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(coherence(&phi).unwrap_err(), Error::ColumnsNotNormalized);
    }

    #[test]
    fn coherence_matches_pairwise_scan() {
        let phi =
            normalize_columns(&gen_matrix(&Ensemble::Gaussian, 10, 20, 5).unwrap()).unwrap();
        let mu = coherence(&phi).unwrap();
        // Exhaustive double loop over normalized columns.
        let mut expect = 0.0_f64;
        for i in 0..20 {
            for j in 0..20 {
                if i != j {
                    expect = expect.max(dot(&phi.column(i), &phi.column(j)).abs());
                }
            }
        }
        assert_abs_diff_eq!(mu, expect, epsilon = 1e-15);
    }
}
