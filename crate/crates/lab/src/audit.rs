//! Randomized audit suites for the recovery-analysis inequalities.
//!
//! Each suite draws seeded instances, obtains the exact isometry constant of
//! the instance's matrix at the order the inequality requires (cached per
//! matrix and order), evaluates the bound, and reports one row per check.
//! The pool holds near-orthonormal perturbed-identity matrices: those are
//! the desk-scale matrices whose exact constants stay below 1, which the
//! bounds require to be meaningful.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use greedylab_core::model::rip::rip_exact;
use greedylab_core::model::{gen_matrix, gen_sparse, Ensemble, SparseSignal, ValueDist};
use greedylab_core::theory::{
    check_gram_restriction, check_inner_product_preservation, check_match_bound,
    check_modified_rip, check_regularized_energy_floor, infinity_norm_floor, BoundCheck,
};
use greedylab_core::DenseMatrix;

use crate::LabError;

/// Suite keys accepted by the audit tool.
pub const LEMMA_KEYS: [&str; 6] = ["ip", "prip", "hbound", "linf", "prop32", "lemma37"];

/// One emitted check, tagged with the trial substream it came from.
#[derive(Debug, Clone)]
pub struct AuditRow {
    pub seed: u64,
    pub check: BoundCheck,
}

/// Per-suite outcome counts.
#[derive(Debug, Clone)]
pub struct SuiteSummary {
    pub lemma: String,
    pub trials: u64,
    pub rows: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub suites: Vec<SuiteSummary>,
}

impl AuditReport {
    pub fn violations(&self) -> usize {
        self.suites.iter().map(|s| s.violations).sum()
    }
}

/// A pooled matrix with its exact isometry constants cached by order.
struct PoolEntry {
    phi: DenseMatrix,
    deltas: BTreeMap<usize, f64>,
}

impl PoolEntry {
    fn delta(&mut self, order: usize) -> f64 {
        if let Some(&d) = self.deltas.get(&order) {
            return d;
        }
        let d = rip_exact(&self.phi, order).expect("pool matrix order in range").delta;
        self.deltas.insert(order, d);
        d
    }
}

/// Largest isometry order any suite requests from a pooled matrix.
const MAX_ORDER: usize = 8;

fn build_pool(seed: u64) -> Vec<PoolEntry> {
    let dims = [10usize, 12, 14, 16];
    let eps_grid = [0.02, 0.05, 0.08, 0.12];
    let mut pool = Vec::new();
    for (i, &n) in dims.iter().enumerate() {
        for (j, &eps) in eps_grid.iter().enumerate() {
            let mut eps = eps;
            // Shrink eps until the largest requested order certifies below 1.
            for _ in 0..6 {
                let phi = gen_matrix(
                    &Ensemble::IdentityPerturbed { eps },
                    n,
                    n,
                    seed ^ ((i * eps_grid.len() + j) as u64).wrapping_mul(0x9e37_79b9),
                )
                .expect("pool generation");
                let top = rip_exact(&phi, MAX_ORDER).expect("pool order").delta;
                if top < 0.9 {
                    let mut deltas = BTreeMap::new();
                    deltas.insert(MAX_ORDER, top);
                    pool.push(PoolEntry { phi, deltas });
                    break;
                }
                eps *= 0.5;
            }
        }
    }
    assert!(!pool.is_empty());
    pool
}

fn rng_for_trial(seed: u64, suite: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64 + 1) << 40) | trial);
    rng
}

/// Random subset of `0..n` of the given size, ascending.
fn random_index_set(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    let mut set = rand::seq::index::sample(rng, n, size).into_vec();
    set.sort_unstable();
    set
}

/// Random sparse signal supported inside the complement of `excluded`.
fn random_disjoint_signal(
    rng: &mut ChaCha8Rng,
    n: usize,
    excluded: &[usize],
    k: usize,
) -> SparseSignal {
    let complement: Vec<usize> = (0..n).filter(|i| !excluded.contains(i)).collect();
    let picks = rand::seq::index::sample(rng, complement.len(), k);
    let mut support: Vec<usize> = picks.iter().map(|p| complement[p]).collect();
    support.sort_unstable();
    let values: Vec<f64> = (0..k)
        .map(|_| loop {
            let v: f64 = rng.sample(rand_distr::StandardNormal);
            if v != 0.0 {
                break v;
            }
        })
        .collect();
    SparseSignal::new(n, support, values).expect("disjoint signal")
}

fn range_draw(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.random::<u64>() as usize) % (hi - lo + 1)
}

/// Runs the requested suites for `trials` instances each. `delta_override`
/// replaces the exact constant wherever one is consumed; an override below
/// the true constant can and should produce reported violations.
pub fn run_audit(
    lemmas: &[String],
    trials: u64,
    seed: u64,
    delta_override: Option<f64>,
) -> Result<AuditReport, LabError> {
    for lemma in lemmas {
        if !LEMMA_KEYS.contains(&lemma.as_str()) {
            return Err(LabError::Invalid {
                field: "lemmas",
                message: format!("unknown lemma `{lemma}`"),
            });
        }
    }
    let mut pool = build_pool(seed);
    let mut report = AuditReport::default();
    for lemma in lemmas {
        let suite_idx = LEMMA_KEYS.iter().position(|k| k == lemma).unwrap();
        let rows_before = report.rows.len();
        let mut violations = 0usize;
        for trial in 0..trials {
            let mut rng = rng_for_trial(seed, suite_idx, trial);
            let entry_idx = (trial as usize) % pool.len();
            let checks =
                run_one(lemma, &mut pool[entry_idx], &mut rng, delta_override)?;
            for check in checks {
                if !check.satisfied {
                    violations += 1;
                }
                report.rows.push(AuditRow { seed: trial, check });
            }
        }
        report.suites.push(SuiteSummary {
            lemma: lemma.clone(),
            trials,
            rows: report.rows.len() - rows_before,
            violations,
        });
    }
    Ok(report)
}

fn run_one(
    lemma: &str,
    entry: &mut PoolEntry,
    rng: &mut ChaCha8Rng,
    delta_override: Option<f64>,
) -> Result<Vec<BoundCheck>, LabError> {
    let n = entry.phi.cols();
    let checks = match lemma {
        "ip" => {
            let ku = range_draw(rng, 1, 4);
            let kv = range_draw(rng, 1, 4);
            let u = gen_sparse(n, ku, ValueDist::Gaussian, rng.random())?;
            let v = gen_sparse(n, kv, ValueDist::Gaussian, rng.random())?;
            let mut union: Vec<usize> = u.support().to_vec();
            for &i in v.support() {
                if !union.contains(&i) {
                    union.push(i);
                }
            }
            let order = union.len().max(1);
            let delta = delta_override.unwrap_or_else(|| entry.delta(order));
            vec![check_inner_product_preservation(&entry.phi, &u, &v, delta)]
        }
        "prip" => {
            let lam_size = range_draw(rng, 0, 2);
            let lambda = random_index_set(rng, n, lam_size);
            let ku = range_draw(rng, 1, 4 - lam_size);
            let k = lam_size + ku;
            let u = random_disjoint_signal(rng, n, &lambda, ku);
            let delta = delta_override.unwrap_or_else(|| entry.delta(k));
            check_modified_rip(&entry.phi, &lambda, &u, k, delta)?.to_vec()
        }
        "hbound" => {
            let lam_size = range_draw(rng, 0, 2);
            let lambda = random_index_set(rng, n, lam_size);
            let kx = range_draw(rng, 1, 3);
            let x = random_disjoint_signal(rng, n, &lambda, kx);
            let order = kx + lam_size + 1;
            let delta = delta_override.unwrap_or_else(|| entry.delta(order));
            check_match_bound(&entry.phi, &lambda, &x, delta)?
        }
        "linf" => {
            let len = range_draw(rng, 1, 16);
            let k = range_draw(rng, 1, len);
            let u = gen_sparse(len, k, ValueDist::Gaussian, rng.random())?.to_dense();
            vec![infinity_norm_floor(&u)?]
        }
        "prop32" => {
            let kx = range_draw(rng, 1, 4);
            let x = gen_sparse(n, kx, ValueDist::Gaussian, rng.random())?;
            let gamma_size = range_draw(rng, 1, 4);
            let gamma = random_index_set(rng, n, gamma_size);
            let mut union: Vec<usize> = x.support().to_vec();
            for &i in &gamma {
                if !union.contains(&i) {
                    union.push(i);
                }
            }
            let delta = delta_override.unwrap_or_else(|| entry.delta(union.len()));
            vec![check_gram_restriction(&entry.phi, &x, &gamma, delta)]
        }
        "lemma37" => {
            let len = range_draw(rng, 2, 16);
            let u = gen_sparse(len, len, ValueDist::Gaussian, rng.random())?.to_dense();
            let (_, check) = check_regularized_energy_floor(&u)?;
            vec![check]
        }
        other => {
            return Err(LabError::Invalid {
                field: "lemmas",
                message: format!("unknown lemma `{other}`"),
            })
        }
    };
    Ok(checks)
}
