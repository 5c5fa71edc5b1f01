//! Phase-transition sweeps: empirical recovery rates over an (M, K) grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use greedylab_core::greedy::{exact_recovery, omp_recover, romp_recover, StoppingRule};
use greedylab_core::model::{gen_decaying, gen_matrix, gen_sparse, Ensemble, ValueDist};

use crate::config::{Algorithm, EnsembleSpec, ExperimentSpec, SignalSpec, ValueDistSpec};
use crate::LabError;

/// Aggregate outcome of one (M, K) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub m: usize,
    pub k: usize,
    pub trials: u64,
    pub successes: u64,
    /// Exactly `successes / trials`.
    pub success_rate: f64,
    pub mean_iterations: f64,
}

/// Runs the sweep described by the spec. Cells are visited in ascending
/// (M, K) order and each trial runs on its own seed substream, so the output
/// is a pure function of (spec, seed) regardless of scheduling.
pub fn run_phase(spec: &ExperimentSpec) -> Result<Vec<PhaseCell>, LabError> {
    let n = spec.n()?;
    let trials = spec.trials()?;
    let seed = spec.seed()?;
    let mut m_range = spec.m_range.clone().expect("validated");
    let mut k_range = spec.k_range.clone().expect("validated");
    m_range.sort_unstable();
    m_range.dedup();
    k_range.sort_unstable();
    k_range.dedup();
    let ensemble_spec = spec.ensemble.clone().unwrap_or(EnsembleSpec::Gaussian);
    let algorithm = spec.algorithm.unwrap_or(Algorithm::Omp);

    let mut cells = Vec::new();
    let mut cell_index = 0u64;
    for &m in &m_range {
        for &k in &k_range {
            if k > m.min(n) {
                return Err(LabError::Invalid {
                    field: "k_range",
                    message: format!("k = {k} exceeds min(m, n) for m = {m}"),
                });
            }
            let mut successes = 0u64;
            let mut iterations_total = 0u64;
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(cell_index * trials + trial);
                let matrix_seed: u64 = rng.random();
                let signal_seed: u64 = rng.random();
                let ensemble = match &ensemble_spec {
                    EnsembleSpec::Gaussian => Ensemble::Gaussian,
                    EnsembleSpec::Bernoulli => Ensemble::Bernoulli,
                    EnsembleSpec::IdentityPerturbed { eps } => {
                        Ensemble::IdentityPerturbed { eps: *eps }
                    }
                    EnsembleSpec::Explicit { .. } => unreachable!("rejected by validation"),
                };
                let phi = gen_matrix(&ensemble, m, n, matrix_seed)?;
                let x = match &spec.signal {
                    None | Some(SignalSpec::Sparse { dist: ValueDistSpec::Gaussian }) => {
                        gen_sparse(n, k, ValueDist::Gaussian, signal_seed)?
                    }
                    Some(SignalSpec::Sparse { dist: ValueDistSpec::UnitSigns }) => {
                        gen_sparse(n, k, ValueDist::UnitSigns, signal_seed)?
                    }
                    Some(SignalSpec::Decaying { alpha }) => {
                        gen_decaying(n, k, *alpha, signal_seed)?
                    }
                    Some(SignalSpec::File { .. }) => {
                        return Err(LabError::Invalid {
                            field: "signal",
                            message: "phase sweeps draw fresh signals per trial".into(),
                        })
                    }
                };
                let y = phi.matvec(&x.to_dense());
                let stop = StoppingRule::for_sparsity(k);
                let trace = match algorithm {
                    Algorithm::Omp => omp_recover(&phi, &y, &stop),
                    Algorithm::Romp => romp_recover(&phi, &y, k, &stop),
                };
                match trace {
                    Ok(trace) => {
                        iterations_total += trace.iterations_run as u64;
                        if exact_recovery(&trace.final_estimate, &x) {
                            successes += 1;
                        }
                    }
                    // A rank-deficient selection is a failed trial, not an
                    // aborted sweep.
                    Err(err) => {
                        iterations_total += err.partial.iterations_run as u64;
                    }
                }
            }
            cells.push(PhaseCell {
                m,
                k,
                trials,
                successes,
                success_rate: successes as f64 / trials as f64,
                mean_iterations: iterations_total as f64 / trials as f64,
            });
            cell_index += 1;
        }
    }
    Ok(cells)
}
