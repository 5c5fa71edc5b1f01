//! Small-scale end-to-end recovery checks: certified isometry constants
//! below the respective thresholds force exact recovery over exhaustively
//! enumerated supports.

use greedylab_core::greedy::{exact_recovery, omp_recover, romp_recover, StoppingRule};
use greedylab_core::model::rip::{rip_exact, supports};
use greedylab_core::model::{
    gen_decaying, gen_matrix, ordered_magnitudes, Ensemble, SparseSignal, ValueDist,
};
use greedylab_core::theory::{decay_ratio_threshold, omp_recovery_threshold, romp_recovery_threshold};
use greedylab_core::DenseMatrix;

/// First identity-perturbed matrix (scanning a deterministic eps/seed grid)
/// whose exact order-`order` constant passes `accept`.
fn find_certified(
    n: usize,
    order: usize,
    accept: impl Fn(f64) -> bool,
) -> Option<(DenseMatrix, f64)> {
    for seed in 0..40u64 {
        for eps in [0.2, 0.15, 0.12, 0.1, 0.08, 0.06, 0.04, 0.03, 0.02, 0.01, 0.005] {
            let phi = gen_matrix(&Ensemble::IdentityPerturbed { eps }, n, n, seed).unwrap();
            let delta = rip_exact(&phi, order).unwrap().delta;
            if accept(delta) {
                return Some((phi, delta));
            }
        }
    }
    None
}

#[test]
fn certified_matrices_recover_every_sparse_signal() {
    // Order-(k+1) constant under 1/(3 sqrt(k)): every k-sparse signal over
    // every support comes back exactly, in exactly k iterations.
    let k = 2;
    let n = 8;
    let threshold = omp_recovery_threshold(k);
    let (phi, delta) = find_certified(n, k + 1, |d| d < threshold).expect("no certified matrix");
    assert!(delta < threshold);
    for support in supports(n, k) {
        for (v0, v1) in [(1.0, 1.0), (1.0, -1.0), (-2.0, 0.5)] {
            let x = SparseSignal::new(n, support.clone(), vec![v0, v1]).unwrap();
            let y = phi.matvec(&x.to_dense());
            let trace = omp_recover(&phi, &y, &StoppingRule::for_sparsity(k)).unwrap();
            assert_eq!(trace.iterations_run, k, "support {support:?}");
            assert!(
                exact_recovery(&trace.final_estimate, &x),
                "missed support {support:?} with values ({v0}, {v1})"
            );
        }
    }
}

#[test]
fn decaying_signals_recover_in_magnitude_order() {
    // A constant between the worst-case threshold and 1/3 does not cover all
    // signals, but strongly decaying ones are picked up largest-first.
    let k = 3;
    let n = 8;
    let lo = omp_recovery_threshold(k);
    let (phi, delta) =
        find_certified(n, k + 1, |d| d > lo && d < 1.0 / 3.0).expect("no certified matrix");
    let alpha = 1.05 * decay_ratio_threshold(delta, k).unwrap();
    for seed in 0..40u64 {
        let x = gen_decaying(n, k, alpha, seed).unwrap();
        let y = phi.matvec(&x.to_dense());
        let trace = omp_recover(&phi, &y, &StoppingRule::for_sparsity(k)).unwrap();
        assert!(exact_recovery(&trace.final_estimate, &x), "seed {seed}");
        let picks: Vec<usize> =
            trace.iterations.iter().map(|r| r.chosen_indices[0]).collect();
        assert_eq!(
            picks,
            ordered_magnitudes(&x).permutation,
            "selection order must follow decreasing magnitudes (seed {seed})"
        );
    }
}

#[test]
fn romp_certified_recovery_with_per_iteration_majority() {
    // Order-3k constant at or below 0.13/sqrt(log2 k): ROMP recovers every
    // k-sparse signal in at most k iterations, every regularized batch is
    // majority-correct, and the support never exceeds 2k.
    let k = 2;
    let n = 8;
    let threshold = romp_recovery_threshold(k).unwrap();
    let (phi, _delta) =
        find_certified(n, 3 * k, |d| d <= threshold).expect("no certified matrix");
    for support in supports(n, k) {
        for seed in 0..2u64 {
            let x = SparseSignal::new(
                n,
                support.clone(),
                match seed {
                    0 => vec![1.0, -1.0],
                    _ => vec![3.0, 0.4],
                },
            )
            .unwrap();
            let y = phi.matvec(&x.to_dense());
            let trace = romp_recover(&phi, &y, k, &StoppingRule::for_sparsity(k)).unwrap();
            assert!(trace.iterations_run <= k);
            assert!(
                exact_recovery(&trace.final_estimate, &x),
                "missed support {support:?}"
            );
            for rec in &trace.iterations {
                let correct =
                    rec.chosen_indices.iter().filter(|j| x.support().contains(j)).count();
                assert!(
                    2 * correct >= rec.chosen_indices.len(),
                    "regularized batch {:?} not majority-correct on {support:?}",
                    rec.chosen_indices
                );
                assert!(rec.lambda_after.len() <= 2 * k);
            }
        }
    }
}

#[test]
fn coherence_condition_forces_recovery() {
    // Unit-norm columns with coherence under 1/(2k-1) recover every k-sparse
    // signal regardless of the isometry constant route.
    let k = 2;
    let n = 8;
    let mut found = false;
    for seed in 0..20u64 {
        let phi = gen_matrix(&Ensemble::IdentityPerturbed { eps: 0.1 }, n, n, seed).unwrap();
        let mu = greedylab_core::model::coherence(&phi).unwrap();
        if !greedylab_core::theory::coherence_condition(mu, k) {
            continue;
        }
        found = true;
        for support in supports(n, k) {
            let x = SparseSignal::new(n, support.clone(), vec![1.0, -2.0]).unwrap();
            let y = phi.matvec(&x.to_dense());
            let trace = omp_recover(&phi, &y, &StoppingRule::for_sparsity(k)).unwrap();
            assert!(exact_recovery(&trace.final_estimate, &x), "support {support:?}");
        }
        break;
    }
    assert!(found, "no matrix satisfied the coherence condition");
}

#[test]
fn identity_matrix_recovers_anything() {
    let phi = DenseMatrix::identity(12);
    for seed in 0..20u64 {
        let x = greedylab_core::model::gen_sparse(12, 4, ValueDist::Gaussian, seed).unwrap();
        let y = phi.matvec(&x.to_dense());
        let trace = omp_recover(&phi, &y, &StoppingRule::for_sparsity(4)).unwrap();
        assert!(exact_recovery(&trace.final_estimate, &x));
        assert_eq!(trace.iterations_run, 4);
    }
}
