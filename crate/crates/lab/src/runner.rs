//! Executes validated experiment specs and writes their outputs.
//!
//! When a spec names an output path the machine-readable document goes to
//! that file and a human summary to stdout; without one the document itself
//! goes to stdout and the summary to stderr, so pipelines always get clean
//! machine output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use greedylab_core::greedy::{exact_recovery, omp_recover, romp_recover, StoppingRule};
use greedylab_core::model::rip::{rip_exact_with_budget, rip_sampled, DEFAULT_ENUMERATION_BUDGET};
use greedylab_core::model::{
    coherence, gen_decaying, gen_matrix, gen_sparse, normalize_columns, Ensemble, SparseSignal,
    ValueDist,
};
use greedylab_core::theory::{
    coherence_condition, counterexample_search, DEFAULT_DELTA_CEILING,
};
use greedylab_core::DenseMatrix;

use crate::audit::run_audit;
use crate::config::{
    Algorithm, EnsembleSpec, ExperimentKind, ExperimentSpec, SignalSpec, ValueDistSpec,
};
use crate::formats::{
    bound_checks_to_csv, matrix_to_csv, phase_to_csv, read_matrix_csv, read_signal_json,
    signal_to_json, RipReportFile, TraceFile,
};
use crate::phase::run_phase;
use crate::LabError;

/// How a finished run should be reported to the shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Exit 0: success or a passing verdict.
    Success,
    /// Exit 1: a legitimate negative result.
    Negative,
}

/// Validates and executes one experiment spec.
pub fn run(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    spec.validate()?;
    match spec.kind()? {
        ExperimentKind::Recover => run_recover(spec),
        ExperimentKind::Rip => run_rip(spec),
        ExperimentKind::Coherence => run_coherence(spec),
        ExperimentKind::Audit => run_audit_cmd(spec),
        ExperimentKind::Phase => run_phase_cmd(spec),
        ExperimentKind::Counterexample => run_counterexample(spec),
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), LabError> {
    fs::write(path, content).map_err(|e| LabError::Io { path: path.to_path_buf(), source: e })
}

/// Machine output to the spec's file (summary to stdout), or machine output
/// to stdout (summary to stderr) when no path was given.
fn emit(output: Option<&PathBuf>, machine: &str, summary: &str) -> Result<(), LabError> {
    match output {
        Some(path) => {
            write_file(path, machine)?;
            println!("{summary}");
        }
        None => {
            print!("{machine}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn resolve_matrix(spec: &ExperimentSpec) -> Result<DenseMatrix, LabError> {
    let ensemble = match spec.ensemble()? {
        EnsembleSpec::Gaussian => Ensemble::Gaussian,
        EnsembleSpec::Bernoulli => Ensemble::Bernoulli,
        EnsembleSpec::IdentityPerturbed { eps } => Ensemble::IdentityPerturbed { eps: *eps },
        EnsembleSpec::Explicit { path } => Ensemble::Explicit(read_matrix_csv(path)?),
    };
    let phi = gen_matrix(&ensemble, spec.m()?, spec.n()?, spec.seed()?)?;
    if let Some(path) = &spec.dump_matrix {
        write_file(path, &matrix_to_csv(&phi))?;
    }
    Ok(phi)
}

fn resolve_signal(spec: &ExperimentSpec, n: usize) -> Result<SparseSignal, LabError> {
    let seed = spec.seed()?.wrapping_add(1);
    let signal = match &spec.signal {
        None | Some(SignalSpec::Sparse { dist: ValueDistSpec::Gaussian }) => {
            gen_sparse(n, spec.k()?, ValueDist::Gaussian, seed)?
        }
        Some(SignalSpec::Sparse { dist: ValueDistSpec::UnitSigns }) => {
            gen_sparse(n, spec.k()?, ValueDist::UnitSigns, seed)?
        }
        Some(SignalSpec::Decaying { alpha }) => gen_decaying(n, spec.k()?, *alpha, seed)?,
        Some(SignalSpec::File { path }) => {
            let x = read_signal_json(path)?;
            if x.dimension() != n {
                return Err(LabError::Invalid {
                    field: "signal",
                    message: format!("signal dimension {} does not match n = {n}", x.dimension()),
                });
            }
            x
        }
    };
    Ok(signal)
}

fn format_indices(indices: &[usize]) -> String {
    let one_based: Vec<String> = indices.iter().map(|&i| (i + 1).to_string()).collect();
    format!("{{{}}}", one_based.join(", "))
}

fn run_recover(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let phi = resolve_matrix(spec)?;
    let n = spec.n()?;
    let x = resolve_signal(spec, n)?;
    let k = spec.k.unwrap_or_else(|| x.sparsity());
    let algorithm = spec.algorithm.unwrap_or(Algorithm::Omp);
    if algorithm == Algorithm::Romp && k == 0 {
        return Err(LabError::Invalid { field: "k", message: "romp needs k >= 1".into() });
    }
    let stop = StoppingRule::new(
        spec.max_iterations.or(if k >= 1 { Some(k) } else { None }),
        Some(spec.residual_tol.unwrap_or(1e-10)),
    )
    .map_err(LabError::from)?;
    let y = phi.matvec(&x.to_dense());
    let trace = match algorithm {
        Algorithm::Omp => omp_recover(&phi, &y, &stop),
        Algorithm::Romp => romp_recover(&phi, &y, k, &stop),
    }
    .map_err(|e| LabError::from(e.error))?;
    let recovered = exact_recovery(&trace.final_estimate, &x);
    let algorithm_name = match algorithm {
        Algorithm::Omp => "omp",
        Algorithm::Romp => "romp",
    };
    let file = TraceFile::new(algorithm_name, phi.rows(), phi.cols(), &trace);
    let picks: Vec<usize> =
        trace.iterations.iter().flat_map(|r| r.chosen_indices.iter().copied()).collect();
    let summary = format!(
        "recover[{algorithm_name}]: m={} n={} k={k} seed={}\n\
         iterations={} converged={} final_residual={}\n\
         chosen={} true_support={}\n\
         exact_recovery={}",
        phi.rows(),
        phi.cols(),
        spec.seed()?,
        trace.iterations_run,
        trace.converged,
        trace.iterations.last().map(|r| r.residual_norm_after).unwrap_or(0.0),
        format_indices(&picks),
        format_indices(x.support()),
        recovered
    );
    emit(spec.output.as_ref(), &file.to_json(), &summary)?;
    Ok(if recovered { Outcome::Success } else { Outcome::Negative })
}

fn run_rip(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let phi = resolve_matrix(spec)?;
    let k = spec.k()?;
    let report = match spec.trials {
        Some(trials) => rip_sampled(&phi, k, trials, spec.seed()?.wrapping_add(2))?,
        None => {
            rip_exact_with_budget(&phi, k, spec.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET))?
        }
    };
    let file = RipReportFile::new(&report);
    let summary = format!(
        "delta_{k} = {} ({}; witness {}; {} supports examined)",
        report.delta,
        file.mode,
        format_indices(&report.witness_support),
        report.supports_examined
    );
    emit(spec.output.as_ref(), &file.to_json(), &summary)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct CoherenceReportFile {
    m: usize,
    n: usize,
    mu: f64,
    normalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition_holds: Option<bool>,
}

fn run_coherence(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let raw = resolve_matrix(spec)?;
    // The coherence condition presumes unit columns; the random sign/normal
    // ensembles get normalized here, explicit matrices are taken as given.
    let normalized = matches!(
        spec.ensemble()?,
        EnsembleSpec::Gaussian | EnsembleSpec::Bernoulli
    );
    let phi = if normalized { normalize_columns(&raw)? } else { raw };
    let mu = coherence(&phi)?;
    let (threshold, holds) = match spec.k {
        Some(k) => (
            Some(1.0 / (2 * k - 1) as f64),
            Some(coherence_condition(mu, k)),
        ),
        None => (None, None),
    };
    let file = CoherenceReportFile {
        m: phi.rows(),
        n: phi.cols(),
        mu,
        normalized,
        k: spec.k,
        condition_threshold: threshold,
        condition_holds: holds,
    };
    let mut machine = serde_json::to_string_pretty(&file).expect("serialize");
    machine.push('\n');
    let summary = match (spec.k, holds) {
        (Some(k), Some(h)) => format!("mu = {mu} (k={k}: condition mu < 1/(2k-1) is {h})"),
        _ => format!("mu = {mu}"),
    };
    emit(spec.output.as_ref(), &machine, &summary)?;
    Ok(Outcome::Success)
}

fn run_audit_cmd(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let lemmas = spec
        .lemmas
        .clone()
        .unwrap_or_else(|| crate::audit::LEMMA_KEYS.iter().map(|s| s.to_string()).collect());
    let report = run_audit(&lemmas, spec.trials()?, spec.seed()?, spec.delta_override)?;
    let csv = bound_checks_to_csv(report.rows.iter().map(|r| (r.seed, &r.check)));
    let mut summary = String::new();
    for suite in &report.suites {
        summary.push_str(&format!(
            "{}: trials={} checks={} violations={}\n",
            suite.lemma, suite.trials, suite.rows, suite.violations
        ));
    }
    let verdict_pass = report.violations() == 0;
    summary.push_str(&format!(
        "verdict: {} ({} violations)",
        if verdict_pass { "PASS" } else { "FAIL" },
        report.violations()
    ));
    emit(spec.output.as_ref(), &csv, &summary)?;
    Ok(if verdict_pass { Outcome::Success } else { Outcome::Negative })
}

fn run_phase_cmd(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let cells = run_phase(spec)?;
    let csv = phase_to_csv(&cells);
    let summary = format!(
        "phase: {} cells, {} trials each, algorithm={}",
        cells.len(),
        spec.trials()?,
        match spec.algorithm.unwrap_or(Algorithm::Omp) {
            Algorithm::Omp => "omp",
            Algorithm::Romp => "romp",
        }
    );
    emit(spec.output.as_ref(), &csv, &summary)?;
    Ok(Outcome::Success)
}

fn run_counterexample(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let k = spec.k.unwrap_or(2);
    let ceiling = spec.delta_ceiling.unwrap_or(DEFAULT_DELTA_CEILING);
    let budget = spec.budget.unwrap_or(20_000);
    match counterexample_search(k, ceiling, budget, spec.seed()?) {
        Ok(found) => {
            let stem = spec
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from("counterexample"));
            let matrix_path = stem.with_extension("matrix.csv");
            let signal_path = stem.with_extension("signal.json");
            let trace_path = stem.with_extension("trace.json");
            write_file(&matrix_path, &matrix_to_csv(&found.matrix))?;
            write_file(&signal_path, &signal_to_json(&found.signal))?;
            let trace_file =
                TraceFile::new("omp", found.matrix.rows(), found.matrix.cols(), &found.trace);
            write_file(&trace_path, &trace_file.to_json())?;
            let first_pick = found.trace.iterations[0].chosen_indices[0];
            println!(
                "counterexample found: delta_3 = {} (certificate <= {ceiling} + 1e-9)\n\
                 true support {}, first pick {}, final support {}\n\
                 wrote {}, {}, {}",
                found.rip.delta,
                format_indices(found.signal.support()),
                first_pick + 1,
                format_indices(
                    &found
                        .trace
                        .final_estimate
                        .iter()
                        .enumerate()
                        .filter(|&(_, &v)| v != 0.0)
                        .map(|(i, _)| i)
                        .collect::<Vec<_>>()
                ),
                matrix_path.display(),
                signal_path.display(),
                trace_path.display()
            );
            Ok(Outcome::Success)
        }
        Err(greedylab_core::Error::NotFound) => {
            println!("no counterexample found within a budget of {budget} evaluations");
            Ok(Outcome::Negative)
        }
        Err(e) => Err(e.into()),
    }
}
