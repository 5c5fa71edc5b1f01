//! Machine-checkable embodiments of the inequalities behind the OMP and ROMP
//! recovery guarantees, plus a search for small matrices on which OMP
//! provably fails despite a moderate isometry constant.
//!
//! Every check takes the isometry constant as an input rather than computing
//! it internally, so one exact enumeration can serve many checks. Slack
//! absorbs floating-point rounding only; a genuine violation beyond the
//! slack fails the check.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::greedy::{exact_recovery, omp_recover, RecoveryTrace, StoppingRule};
use crate::linalg::orthogonalized_matrix;
use crate::mat::{abs, dot, log2, norm2, norm_inf, sqrt, DenseMatrix};
use crate::model::rip::{rip_exact, RipReport};
use crate::model::{normalize_columns, SparseSignal};
use crate::{Error, Result};

/// Default ceiling for [`counterexample_search`]: `1/sqrt(2)`.
pub const DEFAULT_DELTA_CEILING: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Uniform verdict record for one inequality instance: satisfied iff
/// `lhs <= rhs + slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// Suite key (`ip`, `prip_lower`, `hbound`, ...).
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// Absolute tolerance used for the verdict.
    pub slack: f64,
    /// Input descriptors: dimensions, isometry constant, support sizes.
    pub context: String,
}

impl BoundCheck {
    fn evaluate(name: &'static str, lhs: f64, rhs: f64, slack: f64, context: String) -> Self {
        Self { name, lhs, rhs, satisfied: lhs <= rhs + slack, slack, context }
    }
}

/// Rounding slack scaled to the bound: `1e-9 * max(1, rhs)`.
fn bound_slack(rhs: f64) -> f64 {
    1e-9 * rhs.max(1.0)
}

/// Inner-product preservation: for a matrix with isometry constant `delta`
/// at order `max(||u+v||_0, ||u-v||_0)`,
/// `|<Psi u, Psi v> - <u, v>| <= delta ||u|| ||v||`.
pub fn check_inner_product_preservation(
    psi: &DenseMatrix,
    u: &SparseSignal,
    v: &SparseSignal,
    delta: f64,
) -> BoundCheck {
    assert_eq!(u.dimension(), psi.cols());
    assert_eq!(v.dimension(), psi.cols());
    let ud = u.to_dense();
    let vd = v.to_dense();
    let lhs = abs(dot(&psi.matvec(&ud), &psi.matvec(&vd)) - dot(&ud, &vd));
    let rhs = delta * u.norm2() * v.norm2();
    let context = format!(
        "m={} n={} ku={} kv={} delta={}",
        psi.rows(),
        psi.cols(),
        u.sparsity(),
        v.sparsity(),
        delta
    );
    BoundCheck::evaluate("ip", lhs, rhs, bound_slack(rhs), context)
}

/// Near-isometry of the column-orthogonalized matrix: with isometry constant
/// `delta` at order `k` and a selection smaller than `k`, a disjointly
/// supported vector with at most `k - |lambda|` nonzeros satisfies
/// `(1 - delta/(1-delta)) ||u||^2 <= ||A_lambda u||^2 <= (1+delta) ||u||^2`.
/// Both sides are returned as separate records.
pub fn check_modified_rip(
    phi: &DenseMatrix,
    lambda: &[usize],
    u: &SparseSignal,
    k: usize,
    delta: f64,
) -> Result<[BoundCheck; 2]> {
    if lambda.len() >= k {
        return Err(Error::PreconditionViolated("selection must be smaller than the order"));
    }
    if u.sparsity() > k - lambda.len() {
        return Err(Error::PreconditionViolated("sparsity budget exceeded"));
    }
    if !u.disjoint_from(lambda) {
        return Err(Error::PreconditionViolated("signal support must avoid the selection"));
    }
    let (lower, upper) = crate::model::rip::modified_rip_bounds(delta, k, lambda.len())?;
    let a = orthogonalized_matrix(phi, lambda)?;
    let au = a.matvec(&u.to_dense());
    let au_sq = dot(&au, &au);
    let u_sq = {
        let n = u.norm2();
        n * n
    };
    let context = format!(
        "m={} n={} k={} lambda={} ku={} delta={}",
        phi.rows(),
        phi.cols(),
        k,
        lambda.len(),
        u.sparsity(),
        delta
    );
    let lower_check = BoundCheck::evaluate(
        "prip_lower",
        lower * u_sq,
        au_sq,
        bound_slack(au_sq),
        context.clone(),
    );
    let upper_check =
        BoundCheck::evaluate("prip_upper", au_sq, upper * u_sq, bound_slack(upper * u_sq), context);
    Ok([lower_check, upper_check])
}

/// Deviation bound on the match vector `h = A_lambdaᵀ A_lambda x`: with
/// isometry constant `delta` at order `||x||_0 + |lambda| + 1`, every entry
/// off the selection satisfies
/// `|h(j) - x(j)| <= (delta/(1-delta)) ||x||`. One record per checked index.
pub fn check_match_bound(
    phi: &DenseMatrix,
    lambda: &[usize],
    x_tilde: &SparseSignal,
    delta: f64,
) -> Result<Vec<BoundCheck>> {
    if !x_tilde.disjoint_from(lambda) {
        return Err(Error::PreconditionViolated("signal support must avoid the selection"));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange);
    }
    let a = orthogonalized_matrix(phi, lambda)?;
    let h = a.matvec_t(&a.matvec(&x_tilde.to_dense()));
    let dense = x_tilde.to_dense();
    let rhs = delta / (1.0 - delta) * x_tilde.norm2();
    let slack = bound_slack(rhs);
    let mut checks = Vec::new();
    for (j, &hj) in h.iter().enumerate() {
        if lambda.contains(&j) {
            continue;
        }
        let context = format!(
            "m={} n={} lambda={} kx={} j={} delta={}",
            phi.rows(),
            phi.cols(),
            lambda.len(),
            x_tilde.sparsity(),
            j,
            delta
        );
        checks.push(BoundCheck::evaluate("hbound", abs(hj - dense[j]), rhs, slack, context));
    }
    Ok(checks)
}

/// Whether the residual part of the signal is peaky enough for the next
/// identification to land on its support:
/// `||x||_inf > (2 delta / (1 - delta)) ||x||_2`.
pub fn identification_guarantee(x_tilde: &SparseSignal, delta: f64) -> bool {
    assert!((0.0..1.0).contains(&delta));
    x_tilde.norm_inf() > 2.0 * delta / (1.0 - delta) * x_tilde.norm2()
}

/// Isometry threshold `1/(3 sqrt(k))`: an order-(k+1) constant strictly
/// below it guarantees exact k-sparse OMP recovery in exactly k iterations.
pub fn omp_recovery_threshold(k: usize) -> f64 {
    assert!(k >= 1);
    1.0 / (3.0 * sqrt(k as f64))
}

/// Floor on the peak of any nonzero vector:
/// `||u||_inf >= ||u||_2 / sqrt(||u||_0)`.
pub fn infinity_norm_floor(u: &[f64]) -> Result<BoundCheck> {
    let nnz = u.iter().filter(|&&v| v != 0.0).count();
    if nnz == 0 {
        return Err(Error::ZeroVector);
    }
    let rhs = norm_inf(u);
    let lhs = norm2(u) / sqrt(nnz as f64);
    let slack = 1e-12 * rhs.max(1.0);
    let context = format!("len={} nnz={nnz}", u.len());
    Ok(BoundCheck::evaluate("linf", lhs, rhs, slack, context))
}

/// Magnitude-decay ratio above which a k-sparse signal is recovered by OMP
/// in magnitude order when the order-(k+1) isometry constant is `delta`:
/// `(1 + 2 d sqrt(k-1)) / (1 - 2 d)` with `d = delta/(1-delta)`.
/// Only valid for `delta < 1/3`, where the denominator is positive.
pub fn decay_ratio_threshold(delta: f64, k: usize) -> Result<f64> {
    assert!(k >= 1);
    if !(0.0..1.0 / 3.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange);
    }
    let d = delta / (1.0 - delta);
    Ok((1.0 + 2.0 * d * sqrt((k - 1) as f64)) / (1.0 - 2.0 * d))
}

/// Coherence recovery condition for unit-norm columns: `mu < 1/(2k - 1)`.
pub fn coherence_condition(mu: f64, k: usize) -> bool {
    assert!(k >= 1);
    assert!((0.0..=1.0).contains(&mu));
    mu < 1.0 / (2 * k - 1) as f64
}

/// Restricted Gram deviation: with isometry constant `delta` at order
/// `|supp(x) ∪ gamma|`, `||(Psiᵀ Psi x)|_gamma - x|_gamma|| <= delta ||x||`.
pub fn check_gram_restriction(
    psi: &DenseMatrix,
    x: &SparseSignal,
    gamma: &[usize],
    delta: f64,
) -> BoundCheck {
    assert_eq!(x.dimension(), psi.cols());
    let w = psi.matvec_t(&psi.matvec(&x.to_dense()));
    let dense = x.to_dense();
    let diff_sq: f64 = gamma
        .iter()
        .map(|&j| {
            let d = w[j] - dense[j];
            d * d
        })
        .sum();
    let lhs = sqrt(diff_sq);
    let rhs = delta * x.norm2();
    let context = format!(
        "m={} n={} kx={} gamma={} delta={}",
        psi.rows(),
        psi.cols(),
        x.sparsity(),
        gamma.len(),
        delta
    );
    BoundCheck::evaluate("prop32", lhs, rhs, bound_slack(rhs), context)
}

/// Constructively exhibits a comparable-magnitude subset carrying at least a
/// `1/(2.5 sqrt(log2 K))` fraction of the energy of a length-K vector,
/// K >= 2. Returns the subset together with the verified bound.
pub fn check_regularized_energy_floor(u: &[f64]) -> Result<(Vec<usize>, BoundCheck)> {
    let k = u.len();
    if k < 2 {
        return Err(Error::TooSmall);
    }
    let candidates: Vec<(usize, f64)> =
        u.iter().enumerate().filter(|&(_, &v)| v != 0.0).map(|(i, &v)| (i, v)).collect();
    let gamma = if candidates.is_empty() {
        vec![0]
    } else {
        crate::greedy::regularized_subset(&candidates)?
    };
    let captured_sq: f64 = gamma.iter().map(|&i| u[i] * u[i]).sum();
    let rhs = sqrt(captured_sq);
    let lhs = norm2(u) / (2.5 * sqrt(log2(k as f64)));
    let context = format!("len={k} gamma={}", gamma.len());
    let check = BoundCheck::evaluate("lemma37", lhs, rhs, bound_slack(rhs), context);
    Ok((gamma, check))
}

/// Isometry threshold `0.13 / sqrt(log2 k)` at order `3k`: at or below it,
/// ROMP recovers any k-sparse signal in at most k iterations. Defined for
/// k >= 2; the k = 1 case reduces to OMP and [`omp_recovery_threshold`].
pub fn romp_recovery_threshold(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::TooSmall);
    }
    Ok(0.13 / sqrt(log2(k as f64)))
}

/// A 2-sparse instance on which OMP fails despite a certified order-3
/// isometry constant at or below the requested ceiling.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub matrix: DenseMatrix,
    /// The 2-sparse signal OMP misses.
    pub signal: SparseSignal,
    /// Exact order-3 certificate for `matrix`.
    pub rip: RipReport,
    /// The failing run (2 iterations, wrong support).
    pub trace: RecoveryTrace,
}

/// Searches for a matrix with order-3 isometry constant at most
/// `delta_ceiling` (plus `1e-9` rounding) on which OMP fails to recover some
/// 2-sparse signal within 2 iterations.
///
/// The family searched: two unit columns placed symmetrically about an axis
/// and a third unit "decoy" column correlated with their sum, so that a
/// signal with equal weights on the symmetric pair correlates best with the
/// decoy; candidates are then refined by local perturbation to shrink the
/// certified constant while the failure persists. `budget` bounds the total
/// number of candidate evaluations. Only `k = 2` is supported.
pub fn counterexample_search(
    k: usize,
    delta_ceiling: f64,
    budget: u64,
    seed: u64,
) -> Result<Counterexample> {
    if k != 2 {
        return Err(Error::PreconditionViolated("the search family covers k = 2 only"));
    }
    if !delta_ceiling.is_finite() || delta_ceiling <= 0.0 {
        return Err(Error::DeltaOutOfRange);
    }
    let signal = SparseSignal::new(3, vec![0, 1], vec![1.0, 1.0])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals: u64 = 0;
    let mut best: Option<(f64, DenseMatrix)> = None;

    // Coarse scan of the two-parameter family.
    while evals < budget && best.is_none() {
        let axis_cos = 0.50 + 0.22 * rng.random::<f64>();
        let decoy_pull = 0.002 + 0.058 * rng.random::<f64>();
        let phi = symmetric_pair_decoy(axis_cos, decoy_pull)?;
        evals += 1;
        if let Some(delta) = certified_failure(&phi, &signal, delta_ceiling)? {
            best = Some((delta, phi));
        }
    }

    // Local refinement: random perturbations kept only while the failure
    // persists and the certificate improves.
    if let Some((mut best_delta, mut best_phi)) = best.take() {
        let mut stale = 0;
        while evals < budget && stale < 40 {
            let mut cand = best_phi.clone();
            for r in 0..cand.rows() {
                for c in 0..cand.cols() {
                    let z: f64 = rng.sample(StandardNormal);
                    cand[(r, c)] += 1e-3 * z;
                }
            }
            let cand = normalize_columns(&cand)?;
            evals += 1;
            match certified_failure(&cand, &signal, delta_ceiling)? {
                Some(delta) if delta < best_delta => {
                    best_delta = delta;
                    best_phi = cand;
                    stale = 0;
                }
                _ => stale += 1,
            }
        }
        let rip = rip_exact(&best_phi, 3)?;
        let trace = omp_recover(&best_phi, &best_phi.matvec(&signal.to_dense()), &StoppingRule::for_sparsity(2))
            .map_err(|e| e.error)?;
        return Ok(Counterexample { matrix: best_phi, signal, rip, trace });
    }
    Err(Error::NotFound)
}

/// Three unit columns in R^3: a symmetric pair `(a, +-s, 0)` and a decoy
/// `(c, 0, sqrt(1 - c^2))` with `c = a + pull` leaning toward the pair's sum.
fn symmetric_pair_decoy(axis_cos: f64, decoy_pull: f64) -> Result<DenseMatrix> {
    let a = axis_cos;
    let c = a + decoy_pull;
    if !(0.0 < a && a < 1.0 && c < 1.0) {
        return Err(Error::PreconditionViolated("family parameters out of range"));
    }
    let s = sqrt(1.0 - a * a);
    let h = sqrt(1.0 - c * c);
    DenseMatrix::from_rows(
        3,
        3,
        vec![
            a, a, c, //
            s, -s, 0.0, //
            0.0, 0.0, h,
        ],
    )
}

/// Evaluates one candidate: returns its exact order-3 constant when it is at
/// or below the ceiling (plus rounding) and OMP misses the signal in 2
/// iterations.
fn certified_failure(
    phi: &DenseMatrix,
    signal: &SparseSignal,
    delta_ceiling: f64,
) -> Result<Option<f64>> {
    let report = rip_exact(phi, 3)?;
    if report.delta > delta_ceiling + 1e-9 {
        return Ok(None);
    }
    let y = phi.matvec(&signal.to_dense());
    let trace = match omp_recover(phi, &y, &StoppingRule::for_sparsity(2)) {
        Ok(t) => t,
        // A rank-deficient selection is not the failure mode of interest.
        Err(_) => return Ok(None),
    };
    if exact_recovery(&trace.final_estimate, signal) {
        Ok(None)
    } else {
        Ok(Some(report.delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rip::rip_exact;
    use crate::model::{gen_matrix, gen_sparse, Ensemble, ValueDist};
    use approx::assert_abs_diff_eq;

    #[test]
    fn inner_product_check_orthonormal_is_exact() {
        let psi = DenseMatrix::identity(6);
        let u = SparseSignal::new(6, vec![0, 3], vec![1.0, -0.5]).unwrap();
        let v = SparseSignal::new(6, vec![1, 3], vec![2.0, 0.25]).unwrap();
        let check = check_inner_product_preservation(&psi, &u, &v, 0.0);
        assert!(check.satisfied);
        assert!(check.lhs <= 1e-14);
    }

    #[test]
    fn inner_product_check_self_reduces_to_isometry() {
        let phi = gen_matrix(&Ensemble::Gaussian, 8, 10, 3).unwrap();
        let u = gen_sparse(10, 2, ValueDist::Gaussian, 4).unwrap();
        let delta = rip_exact(&phi, 2).unwrap().delta;
        let check = check_inner_product_preservation(&phi, &u, &u, delta);
        assert!(check.satisfied, "{check:?}");
        // lhs here is exactly the isometry defect of u.
        let pu = phi.matvec(&u.to_dense());
        let defect = (dot(&pu, &pu) - u.norm2() * u.norm2()).abs();
        assert_abs_diff_eq!(check.lhs, defect, epsilon = 1e-12);
    }

    #[test]
    fn modified_rip_check_empty_selection_reduces_to_isometry() {
        let phi = gen_matrix(&Ensemble::IdentityPerturbed { eps: 0.08 }, 10, 10, 5).unwrap();
        let u = gen_sparse(10, 3, ValueDist::Gaussian, 6).unwrap();
        let delta = rip_exact(&phi, 3).unwrap().delta;
        assert!(delta < 1.0);
        let [lower, upper] = check_modified_rip(&phi, &[], &u, 3, delta).unwrap();
        assert!(lower.satisfied && upper.satisfied);
    }

    #[test]
    fn modified_rip_check_orthonormal_is_tight() {
        let phi = DenseMatrix::identity(6);
        let u = SparseSignal::new(6, vec![2, 4], vec![1.0, 2.0]).unwrap();
        let [lower, upper] = check_modified_rip(&phi, &[0, 1], &u, 4, 0.0).unwrap();
        assert!(lower.satisfied && upper.satisfied);
        assert_abs_diff_eq!(lower.lhs, lower.rhs, epsilon = 1e-12);
        assert_abs_diff_eq!(upper.lhs, upper.rhs, epsilon = 1e-12);
    }

    #[test]
    fn modified_rip_check_preconditions() {
        let phi = DenseMatrix::identity(6);
        let u = SparseSignal::new(6, vec![0], vec![1.0]).unwrap();
        assert!(check_modified_rip(&phi, &[0], &u, 2, 0.1).is_err()); // overlap
        assert!(check_modified_rip(&phi, &[1, 2], &u, 2, 0.1).is_err()); // |lambda| >= k
        let big = SparseSignal::new(6, vec![3, 4, 5], vec![1.0, 1.0, 1.0]).unwrap();
        assert!(check_modified_rip(&phi, &[0], &big, 2, 0.1).is_err()); // budget
    }

    #[test]
    fn match_bound_orthonormal_recovers_signal_exactly() {
        let phi = DenseMatrix::identity(5);
        let x = SparseSignal::new(5, vec![2, 4], vec![1.5, -0.5]).unwrap();
        let checks = check_match_bound(&phi, &[0], &x, 0.0).unwrap();
        assert_eq!(checks.len(), 4);
        for c in &checks {
            assert!(c.satisfied);
            assert!(c.lhs <= 1e-12);
        }
    }

    #[test]
    fn identification_guarantee_cases() {
        // Zero constant: any nonzero signal qualifies.
        let x = SparseSignal::new(4, vec![1], vec![0.2]).unwrap();
        assert!(identification_guarantee(&x, 0.0));
        // Two equal entries at delta = 0.3: peak 1, threshold ~1.212.
        let flat = SparseSignal::new(4, vec![0, 1], vec![1.0, 1.0]).unwrap();
        assert!(!identification_guarantee(&flat, 0.3));
        // 1-sparse signals pass for any delta < 1/3.
        for delta in [0.0, 0.1, 0.2, 0.33, 0.3332] {
            assert!(identification_guarantee(&x, delta), "delta={delta}");
        }
    }

    #[test]
    fn identification_guarantee_predicts_correct_argmax() {
        // Whenever the peak condition holds with the exact constant at the
        // right order, the largest match-vector entry sits inside the
        // signal's support.
        use crate::linalg::orthogonalized_matrix;
        let mut satisfied = 0;
        for seed in 0..60u64 {
            let phi =
                gen_matrix(&Ensemble::IdentityPerturbed { eps: 0.03 }, 10, 10, seed).unwrap();
            let lambda = [0usize];
            let x = {
                let raw = gen_sparse(10, 2, ValueDist::Gaussian, 100 + seed).unwrap();
                raw.masked_off(&lambda)
            };
            if x.sparsity() == 0 {
                continue;
            }
            let order = x.sparsity() + lambda.len() + 1;
            let delta = rip_exact(&phi, order).unwrap().delta;
            if !identification_guarantee(&x, delta) {
                continue;
            }
            satisfied += 1;
            let a = orthogonalized_matrix(&phi, &lambda).unwrap();
            let h = a.matvec_t(&a.matvec(&x.to_dense()));
            let argmax = h
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                .unwrap()
                .0;
            assert!(
                x.support().contains(&argmax),
                "argmax {argmax} outside support {:?} (seed {seed})",
                x.support()
            );
        }
        assert!(satisfied >= 20, "condition held only {satisfied} times");
    }

    #[test]
    fn omp_threshold_values() {
        assert_abs_diff_eq!(omp_recovery_threshold(1), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omp_recovery_threshold(4), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omp_recovery_threshold(9), 1.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn threshold_implies_identification_margin() {
        // Below the recovery threshold, 2 delta / (1 - delta) stays under
        // 1/sqrt(k); checked over a grid.
        for k in 1..=100usize {
            let thresh = omp_recovery_threshold(k);
            for step in 0..50 {
                let delta = thresh * (step as f64 / 50.0);
                assert!(2.0 * delta / (1.0 - delta) < 1.0 / (k as f64).sqrt());
            }
        }
    }

    #[test]
    fn infinity_floor_cases() {
        // Canonical vector: equality.
        let check = infinity_norm_floor(&[0.0, 1.0, 0.0]).unwrap();
        assert!(check.satisfied);
        assert_abs_diff_eq!(check.lhs, check.rhs, epsilon = 1e-15);
        // All-equal entries: equality again.
        let check = infinity_norm_floor(&[0.5, -0.5, 0.5, -0.5]).unwrap();
        assert_abs_diff_eq!(check.lhs, check.rhs, epsilon = 1e-15);
        assert_eq!(infinity_norm_floor(&[0.0; 3]).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn infinity_floor_never_violated() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100_000 {
            let n = 1 + (rng.random::<u64>() % 24) as usize;
            let u: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            if u.iter().all(|&v| v == 0.0) {
                continue;
            }
            assert!(infinity_norm_floor(&u).unwrap().satisfied);
        }
    }

    #[test]
    fn decay_threshold_values() {
        assert_abs_diff_eq!(decay_ratio_threshold(0.0, 5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(decay_ratio_threshold(0.2, 5).unwrap(), 4.0, epsilon = 1e-12);
        // Approaching 1/3 the threshold blows up.
        assert!(decay_ratio_threshold(1.0 / 3.0 - 1e-9, 5).unwrap() > 1e6);
        assert_eq!(decay_ratio_threshold(1.0 / 3.0, 5).unwrap_err(), Error::DeltaOutOfRange);
        assert_eq!(decay_ratio_threshold(0.4, 5).unwrap_err(), Error::DeltaOutOfRange);
    }

    #[test]
    fn coherence_condition_cases() {
        assert!(coherence_condition(0.9, 1));
        assert!(coherence_condition(0.2, 2));
        assert!(!coherence_condition(0.5, 2));
    }

    #[test]
    fn gram_restriction_orthonormal_is_exact() {
        let psi = DenseMatrix::identity(6);
        let x = SparseSignal::new(6, vec![1, 4], vec![1.0, -2.0]).unwrap();
        let check = check_gram_restriction(&psi, &x, &[0, 4], 0.0);
        assert!(check.satisfied);
        assert!(check.lhs <= 1e-14);
    }

    #[test]
    fn gram_restriction_single_disjoint_index_is_cross_term() {
        let phi = gen_matrix(&Ensemble::Gaussian, 8, 10, 9).unwrap();
        let x = gen_sparse(10, 2, ValueDist::Gaussian, 10).unwrap();
        let j = (0..10).find(|j| !x.support().contains(j)).unwrap();
        let delta = rip_exact(&phi, 3).unwrap().delta;
        let check = check_gram_restriction(&phi, &x, &[j], delta);
        // |<Phi x, Phi e_j>| <= delta ||x||.
        let ej: Vec<f64> = (0..10).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        let cross = dot(&phi.matvec(&x.to_dense()), &phi.matvec(&ej)).abs();
        assert_abs_diff_eq!(check.lhs, cross, epsilon = 1e-12);
        assert!(check.satisfied);
    }

    #[test]
    fn regularized_energy_floor_cases() {
        // All-equal vector: the whole set qualifies and carries everything.
        let (gamma, check) = check_regularized_energy_floor(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(gamma, vec![0, 1, 2, 3]);
        assert!(check.satisfied);
        assert_abs_diff_eq!(check.rhs, 2.0, epsilon = 1e-15);
        // (4, 3, 1): best band keeps {4, 3}.
        let (gamma, check) = check_regularized_energy_floor(&[4.0, 3.0, 1.0]).unwrap();
        assert_eq!(gamma, vec![0, 1]);
        assert_abs_diff_eq!(check.rhs, 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            check.lhs,
            26f64.sqrt() / (2.5 * 3f64.log2().sqrt()),
            epsilon = 1e-12
        );
        assert!(check.satisfied);
        assert_eq!(check_regularized_energy_floor(&[1.0]).unwrap_err(), Error::TooSmall);
    }

    #[test]
    fn regularized_energy_floor_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100_000 {
            let k = 2 + (rng.random::<u64>() % 63) as usize;
            let u: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let (_, check) = check_regularized_energy_floor(&u).unwrap();
            assert!(check.satisfied, "{check:?}");
        }
    }

    #[test]
    fn romp_threshold_values() {
        assert_abs_diff_eq!(romp_recovery_threshold(2).unwrap(), 0.13, epsilon = 1e-15);
        assert_abs_diff_eq!(
            romp_recovery_threshold(4).unwrap(),
            0.13 / 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(romp_recovery_threshold(16).unwrap(), 0.065, epsilon = 1e-15);
        assert_eq!(romp_recovery_threshold(1).unwrap_err(), Error::TooSmall);
    }

    #[test]
    fn counterexample_search_finds_and_certifies() {
        let found = counterexample_search(2, DEFAULT_DELTA_CEILING, 5_000, 7).unwrap();
        assert!(found.rip.delta <= DEFAULT_DELTA_CEILING + 1e-9);
        // Consistency: were the constant below the recovery threshold, the
        // failure would contradict the guarantee.
        assert!(found.rip.delta >= omp_recovery_threshold(2));
        // Replay is deterministic and still fails.
        let y = found.matrix.matvec(&found.signal.to_dense());
        let replay =
            omp_recover(&found.matrix, &y, &StoppingRule::for_sparsity(2)).unwrap();
        assert_eq!(replay, found.trace);
        assert!(!exact_recovery(&replay.final_estimate, &found.signal));
    }

    #[test]
    fn counterexample_search_is_deterministic() {
        let a = counterexample_search(2, DEFAULT_DELTA_CEILING, 2_000, 11).unwrap();
        let b = counterexample_search(2, DEFAULT_DELTA_CEILING, 2_000, 11).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.rip.delta, b.rip.delta);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn counterexample_search_budget_exhaustion() {
        assert_eq!(
            counterexample_search(2, DEFAULT_DELTA_CEILING, 0, 1).unwrap_err(),
            Error::NotFound
        );
        assert!(counterexample_search(3, DEFAULT_DELTA_CEILING, 10, 1).is_err());
    }
}
