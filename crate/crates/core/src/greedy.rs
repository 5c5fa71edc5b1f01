//! Orthogonal matching pursuit and its regularized variant, with full
//! per-iteration traces.
//!
//! Both algorithms keep a support estimate, correlate the current residual
//! with every column (the match vector `h = Phiᵀ r`), grow the support from
//! the largest correlations, and re-solve least squares on the selected
//! columns from scratch. The match vector vanishes on already-selected
//! columns, so the argmax is restricted to their complement and exact zeros
//! are never selected: a zero-correlation column cannot reduce the residual.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::least_squares;
use crate::mat::{abs, norm2, DenseMatrix};
use crate::model::SparseSignal;
use crate::{Error, Result};

/// Relative tolerance of the exact-recovery predicate used across the test
/// suites (support equality plus coefficient agreement).
pub const EXACT_RECOVERY_RTOL: f64 = 1e-6;

/// Residual tolerance used for the convergence verdict when the caller does
/// not supply one.
pub const DEFAULT_RESIDUAL_RTOL: f64 = 1e-10;

/// When to stop iterating. At least one criterion is always active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    max_iterations: Option<usize>,
    residual_tol: Option<f64>,
}

impl StoppingRule {
    /// Requires at least one active criterion, a positive iteration cap, and
    /// a finite nonnegative residual tolerance.
    pub fn new(max_iterations: Option<usize>, residual_tol: Option<f64>) -> Result<Self> {
        match (max_iterations, residual_tol) {
            (None, None) => Err(Error::PreconditionViolated(
                "at least one stopping criterion must be active",
            )),
            (Some(0), _) => Err(Error::PreconditionViolated(
                "iteration cap must be positive",
            )),
            (_, Some(t)) if !t.is_finite() || t < 0.0 => Err(Error::PreconditionViolated(
                "residual tolerance must be finite and nonnegative",
            )),
            _ => Ok(Self { max_iterations, residual_tol }),
        }
    }

    /// Stop after `k` iterations, or earlier once the relative residual
    /// drops below [`DEFAULT_RESIDUAL_RTOL`]. The usual rule when the
    /// sparsity level is known.
    pub fn for_sparsity(k: usize) -> Self {
        assert!(k >= 1);
        Self { max_iterations: Some(k), residual_tol: Some(DEFAULT_RESIDUAL_RTOL) }
    }

    /// Stop after exactly `max` iterations.
    pub fn iterations(max: usize) -> Self {
        assert!(max >= 1);
        Self { max_iterations: Some(max), residual_tol: None }
    }

    /// Stop once `||r|| <= tol * ||y||`.
    pub fn residual(tol: f64) -> Self {
        assert!(tol >= 0.0 && tol.is_finite());
        Self { max_iterations: None, residual_tol: Some(tol) }
    }

    pub fn max_iterations(&self) -> Option<usize> {
        self.max_iterations
    }

    pub fn residual_tol(&self) -> Option<f64> {
        self.residual_tol
    }
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self::residual(DEFAULT_RESIDUAL_RTOL)
    }
}

/// One completed iteration of a pursuit run.
///
/// `match_vector` is the correlation vector computed from the residual
/// *entering* the iteration (so it pairs with the support estimate of the
/// previous record); the remaining fields describe the state *after* the
/// update.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration count.
    pub iteration: usize,
    /// `Phiᵀ r` entering the iteration, length N.
    pub match_vector: Vec<f64>,
    /// Indices added this iteration, ascending (a single index for OMP).
    pub chosen_indices: Vec<usize>,
    /// Support estimate after the update, ascending.
    pub lambda_after: Vec<usize>,
    /// Least-squares coefficients aligned with `lambda_after`.
    pub coeffs_after: Vec<f64>,
    /// Residual vector after the update, length M.
    pub residual_after: Vec<f64>,
    /// Euclidean norm of `residual_after`.
    pub residual_norm_after: f64,
}

/// Complete audit trail of a pursuit run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryTrace {
    pub iterations: Vec<IterationRecord>,
    /// Final estimate as a dense length-N vector.
    pub final_estimate: Vec<f64>,
    /// Whether the final relative residual met the (possibly default)
    /// residual tolerance.
    pub converged: bool,
    pub iterations_run: usize,
}

impl RecoveryTrace {
    fn empty(n: usize) -> Self {
        Self {
            iterations: Vec::new(),
            final_estimate: vec![0.0; n],
            converged: false,
            iterations_run: 0,
        }
    }

    /// The nonzero entries of the final estimate as a sparse signal.
    pub fn recovered_signal(&self) -> Result<SparseSignal> {
        SparseSignal::from_dense(&self.final_estimate)
    }
}

/// A pursuit run that aborted, carrying the trace up to the failure.
#[derive(Debug, Clone)]
pub struct RecoveryError {
    pub error: Error,
    pub partial: RecoveryTrace,
}

impl core::fmt::Display for RecoveryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "recovery aborted after {} iterations: {}", self.partial.iterations_run, self.error)
    }
}

/// Exact-recovery predicate: the nonzero entries of `estimate` occupy
/// exactly the true support and agree with the true values within
/// [`EXACT_RECOVERY_RTOL`] relative.
pub fn exact_recovery(estimate: &[f64], truth: &SparseSignal) -> bool {
    if estimate.len() != truth.dimension() {
        return false;
    }
    let mut support = Vec::new();
    for (i, &v) in estimate.iter().enumerate() {
        if v != 0.0 {
            support.push(i);
        }
    }
    if support != truth.support() {
        return false;
    }
    let truth_dense = truth.to_dense();
    let diff: Vec<f64> = estimate.iter().zip(&truth_dense).map(|(a, b)| a - b).collect();
    norm2(&diff) <= EXACT_RECOVERY_RTOL * truth.norm2()
}

struct GreedyState {
    lambda: Vec<usize>,
    in_lambda: Vec<bool>,
    residual: Vec<f64>,
    residual_norm: f64,
    estimate: Vec<f64>,
    records: Vec<IterationRecord>,
}

impl GreedyState {
    fn start(y: &[f64], n: usize) -> Self {
        Self {
            lambda: Vec::new(),
            in_lambda: vec![false; n],
            residual: y.to_vec(),
            residual_norm: norm2(y),
            estimate: vec![0.0; n],
            records: Vec::new(),
        }
    }

    fn finish(self, stop: &StoppingRule, y_norm: f64) -> RecoveryTrace {
        let tol = stop.residual_tol.unwrap_or(DEFAULT_RESIDUAL_RTOL);
        let iterations_run = self.records.len();
        RecoveryTrace {
            iterations: self.records,
            final_estimate: self.estimate,
            converged: self.residual_norm <= tol * y_norm,
            iterations_run,
        }
    }

    fn partial(&self) -> RecoveryTrace {
        RecoveryTrace {
            iterations: self.records.clone(),
            final_estimate: self.estimate.clone(),
            converged: false,
            iterations_run: self.records.len(),
        }
    }

    /// Adds `chosen` to the support, re-solves least squares on the grown
    /// support, and records the iteration.
    fn update(
        &mut self,
        phi: &DenseMatrix,
        y: &[f64],
        match_vector: Vec<f64>,
        chosen: Vec<usize>,
    ) -> core::result::Result<(), Error> {
        for &j in &chosen {
            debug_assert!(!self.in_lambda[j]);
            self.in_lambda[j] = true;
        }
        self.lambda.extend_from_slice(&chosen);
        self.lambda.sort_unstable();
        let sub = phi.select_columns(&self.lambda)?;
        let sol = least_squares(&sub, y)?;
        self.estimate.iter_mut().for_each(|v| *v = 0.0);
        for (&i, &c) in self.lambda.iter().zip(&sol.coeffs) {
            self.estimate[i] = c;
        }
        self.residual = sol.residual;
        self.residual_norm = sol.residual_norm;
        self.records.push(IterationRecord {
            iteration: self.records.len() + 1,
            match_vector,
            chosen_indices: chosen,
            lambda_after: self.lambda.clone(),
            coeffs_after: sol.coeffs,
            residual_after: self.residual.clone(),
            residual_norm_after: self.residual_norm,
        });
        Ok(())
    }
}

fn check_recovery_inputs(
    phi: &DenseMatrix,
    y: &[f64],
) -> core::result::Result<(), RecoveryError> {
    if y.len() != phi.rows() || y.iter().any(|v| !v.is_finite()) {
        return Err(RecoveryError {
            error: if y.len() != phi.rows() { Error::BadDimensions } else { Error::NonFinite },
            partial: RecoveryTrace::empty(phi.cols()),
        });
    }
    Ok(())
}

/// Orthogonal matching pursuit.
///
/// Each iteration correlates the residual with every column, adds the index
/// of the largest absolute correlation (ties broken by smallest index) to
/// the support, re-solves least squares on the selected columns, and updates
/// the residual. Runs until a stopping criterion fires, the residual cannot
/// be reduced further, or the selected columns span the measurement space.
///
/// On a rank-deficient selection the trace up to the failure is returned
/// inside the error.
pub fn omp_recover(
    phi: &DenseMatrix,
    y: &[f64],
    stop: &StoppingRule,
) -> core::result::Result<RecoveryTrace, RecoveryError> {
    check_recovery_inputs(phi, y)?;
    let y_norm = norm2(y);
    let mut state = GreedyState::start(y, phi.cols());
    loop {
        if let Some(tol) = stop.residual_tol {
            if state.residual_norm <= tol * y_norm {
                break;
            }
        }
        if let Some(max) = stop.max_iterations {
            if state.records.len() >= max {
                break;
            }
        }
        if state.lambda.len() >= phi.rows().min(phi.cols()) {
            break;
        }
        let h = phi.matvec_t(&state.residual);
        // Largest |h(j)| over unselected columns, excluding exact zeros.
        let mut best: Option<(usize, f64)> = None;
        for (j, &hj) in h.iter().enumerate() {
            if state.in_lambda[j] || hj == 0.0 {
                continue;
            }
            let mag = abs(hj);
            if best.is_none_or(|(_, bm)| mag > bm) {
                best = Some((j, mag));
            }
        }
        let Some((j, _)) = best else { break };
        if let Err(error) = state.update(phi, y, h, vec![j]) {
            return Err(RecoveryError { error, partial: state.partial() });
        }
    }
    Ok(state.finish(stop, y_norm))
}

/// Maximal-energy regularized subset of a candidate set.
///
/// `candidates` holds `(index, value)` pairs with nonzero values; zeros must
/// be excluded upstream. A set is regularized when all its magnitudes lie
/// within a factor 2 of each other. Every regularized set is contained in a
/// band `[m, 2m]` floored at one of the candidate magnitudes, so scanning
/// those bands finds a maximal-energy regularized set; energy ties are
/// broken toward the band whose floor element has the smallest index.
/// Returns the chosen indices in ascending order.
pub fn regularized_subset(candidates: &[(usize, f64)]) -> Result<Vec<usize>> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if candidates.iter().any(|&(_, v)| v == 0.0) {
        return Err(Error::PreconditionViolated("candidate values must be nonzero"));
    }
    // Descending magnitude, ties by ascending index.
    let mut sorted: Vec<(usize, f64)> = candidates.to_vec();
    sorted.sort_by(|a, b| abs(b.1).partial_cmp(&abs(a.1)).unwrap().then(a.0.cmp(&b.0)));
    let mags: Vec<f64> = sorted.iter().map(|&(_, v)| abs(v)).collect();
    let mut best_energy = f64::NEG_INFINITY;
    let mut best_floor_index = usize::MAX;
    let mut best_range = (0, 0);
    for floor_pos in 0..sorted.len() {
        let floor = mags[floor_pos];
        // Band [floor, 2*floor]: a contiguous run in the sorted order.
        let start = mags.iter().position(|&m| m <= 2.0 * floor).unwrap();
        let mut end = floor_pos;
        while end + 1 < sorted.len() && mags[end + 1] >= floor {
            end += 1;
        }
        let energy: f64 = sorted[start..=end].iter().map(|&(_, v)| v * v).sum();
        let floor_index = sorted[floor_pos].0;
        if energy > best_energy || (energy == best_energy && floor_index < best_floor_index) {
            best_energy = energy;
            best_floor_index = floor_index;
            best_range = (start, end);
        }
    }
    let mut out: Vec<usize> =
        sorted[best_range.0..=best_range.1].iter().map(|&(i, _)| i).collect();
    out.sort_unstable();
    Ok(out)
}

/// Regularized orthogonal matching pursuit for a known sparsity level `k`.
///
/// Each iteration takes the `k` largest nonzero correlations (all nonzero
/// ones if fewer), keeps their maximal-energy regularized subset, and adds
/// the whole subset to the support; the least-squares update is the same as
/// in [`omp_recover`]. Iteration additionally stops once the support reaches
/// size `2k`. With `k = 1` the run is identical to OMP on the same inputs.
pub fn romp_recover(
    phi: &DenseMatrix,
    y: &[f64],
    k: usize,
    stop: &StoppingRule,
) -> core::result::Result<RecoveryTrace, RecoveryError> {
    check_recovery_inputs(phi, y)?;
    if k == 0 {
        return Err(RecoveryError {
            error: Error::BadDimensions,
            partial: RecoveryTrace::empty(phi.cols()),
        });
    }
    let y_norm = norm2(y);
    let mut state = GreedyState::start(y, phi.cols());
    loop {
        if let Some(tol) = stop.residual_tol {
            if state.residual_norm <= tol * y_norm {
                break;
            }
        }
        if state.lambda.len() >= 2 * k {
            break;
        }
        if let Some(max) = stop.max_iterations {
            if state.records.len() >= max {
                break;
            }
        }
        if state.lambda.len() >= phi.rows().min(phi.cols()) {
            break;
        }
        let h = phi.matvec_t(&state.residual);
        // Top-k nonzero correlations off the current support.
        let mut candidates: Vec<(usize, f64)> = h
            .iter()
            .enumerate()
            .filter(|&(j, &hj)| !state.in_lambda[j] && hj != 0.0)
            .map(|(j, &hj)| (j, hj))
            .collect();
        if candidates.is_empty() {
            break;
        }
        candidates.sort_by(|a, b| abs(b.1).partial_cmp(&abs(a.1)).unwrap().then(a.0.cmp(&b.0)));
        candidates.truncate(k);
        let omega0 = match regularized_subset(&candidates) {
            Ok(set) => set,
            Err(error) => return Err(RecoveryError { error, partial: state.partial() }),
        };
        if let Err(error) = state.update(phi, y, h, omega0) {
            return Err(RecoveryError { error, partial: state.partial() });
        }
    }
    Ok(state.finish(stop, y_norm))
}
