//! On-disk formats: matrix CSV, signal JSON, trace JSON, isometry reports,
//! and the versioned tabular CSVs.
//!
//! All indices in files are 1-based; the in-memory types are 0-based.
//! Floats are rendered with Rust's shortest round-trip formatting, so every
//! written value parses back to the identical double and reruns produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use greedylab_core::greedy::RecoveryTrace;
use greedylab_core::model::rip::{RipMode, RipReport};
use greedylab_core::model::SparseSignal;
use greedylab_core::theory::BoundCheck;
use greedylab_core::DenseMatrix;

use crate::phase::PhaseCell;
use crate::LabError;

/// Version stamp carried as the first line of every tabular CSV.
pub const CSV_VERSION_HEADER: &str = "# greedylab-csv v1";

fn io_err(path: &Path, source: std::io::Error) -> LabError {
    LabError::Io { path: path.to_path_buf(), source }
}

/// Matrix CSV: plain decimal entries, comma-separated, one matrix row per
/// line.
pub fn matrix_to_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let mut first = true;
        for v in m.row(r) {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{v}");
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<DenseMatrix, LabError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| LabError::Parse {
                what: "matrix csv".into(),
                message: format!("line {}: bad float `{}`", lineno + 1, field.trim()),
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(LabError::Parse {
                    what: "matrix csv".into(),
                    message: format!("line {}: ragged row", lineno + 1),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(LabError::Parse { what: "matrix csv".into(), message: "no rows".into() });
    }
    let (r, c) = (rows.len(), rows[0].len());
    DenseMatrix::from_rows(r, c, rows.into_iter().flatten().collect())
        .map_err(LabError::from)
}

pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<(), LabError> {
    fs::write(path, matrix_to_csv(m)).map_err(|e| io_err(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix, LabError> {
    matrix_from_csv(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

/// One `(index, value)` pair of a signal file; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalEntry {
    pub index: usize,
    pub value: f64,
}

/// Signal JSON schema: `{"n": N, "entries": [{"index": i, "value": v}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalFile {
    pub n: usize,
    pub entries: Vec<SignalEntry>,
}

impl SignalFile {
    pub fn from_signal(x: &SparseSignal) -> Self {
        SignalFile {
            n: x.dimension(),
            entries: x
                .support()
                .iter()
                .zip(x.values())
                .map(|(&i, &v)| SignalEntry { index: i + 1, value: v })
                .collect(),
        }
    }

    pub fn to_signal(&self) -> Result<SparseSignal, LabError> {
        let mut entries = self.entries.clone();
        entries.sort_by_key(|e| e.index);
        let mut support = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for e in &entries {
            if e.index == 0 || e.index > self.n {
                return Err(LabError::Parse {
                    what: "signal json".into(),
                    message: format!("index {} outside 1..={}", e.index, self.n),
                });
            }
            support.push(e.index - 1);
            values.push(e.value);
        }
        SparseSignal::new(self.n, support, values).map_err(LabError::from)
    }
}

pub fn signal_to_json(x: &SparseSignal) -> String {
    let mut text = serde_json::to_string_pretty(&SignalFile::from_signal(x)).expect("serialize");
    text.push('\n');
    text
}

pub fn write_signal_json(path: &Path, x: &SparseSignal) -> Result<(), LabError> {
    fs::write(path, signal_to_json(x)).map_err(|e| io_err(path, e))
}

pub fn read_signal_json(path: &Path) -> Result<SparseSignal, LabError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: SignalFile = serde_json::from_str(&text).map_err(|e| LabError::Parse {
        what: "signal json".into(),
        message: e.to_string(),
    })?;
    file.to_signal()
}

/// One iteration of a trace file; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceIteration {
    pub iteration: usize,
    pub match_vector: Vec<f64>,
    pub chosen_indices: Vec<usize>,
    pub lambda_after: Vec<usize>,
    pub residual_norm_after: f64,
}

/// Trace JSON schema for recovery runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub algorithm: String,
    pub m: usize,
    pub n: usize,
    pub converged: bool,
    pub iterations_run: usize,
    pub iterations: Vec<TraceIteration>,
    pub final_estimate: Vec<SignalEntry>,
}

impl TraceFile {
    pub fn new(algorithm: &str, m: usize, n: usize, trace: &RecoveryTrace) -> Self {
        TraceFile {
            algorithm: algorithm.into(),
            m,
            n,
            converged: trace.converged,
            iterations_run: trace.iterations_run,
            iterations: trace
                .iterations
                .iter()
                .map(|rec| TraceIteration {
                    iteration: rec.iteration,
                    match_vector: rec.match_vector.clone(),
                    chosen_indices: rec.chosen_indices.iter().map(|&j| j + 1).collect(),
                    lambda_after: rec.lambda_after.iter().map(|&j| j + 1).collect(),
                    residual_norm_after: rec.residual_norm_after,
                })
                .collect(),
            final_estimate: trace
                .final_estimate
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0.0)
                .map(|(i, &v)| SignalEntry { index: i + 1, value: v })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serialize");
        text.push('\n');
        text
    }
}

pub fn write_trace_json(path: &Path, trace: &TraceFile) -> Result<(), LabError> {
    fs::write(path, trace.to_json()).map_err(|e| io_err(path, e))
}

/// Isometry report JSON; the witness support is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipReportFile {
    pub order: usize,
    pub delta: f64,
    pub mode: String,
    pub witness_support: Vec<usize>,
    pub supports_examined: u64,
}

impl RipReportFile {
    pub fn new(report: &RipReport) -> Self {
        RipReportFile {
            order: report.order,
            delta: report.delta,
            mode: match report.mode {
                RipMode::Exact => "exact".into(),
                RipMode::SampledLowerBound => "sampled_lower_bound".into(),
            },
            witness_support: report.witness_support.iter().map(|&j| j + 1).collect(),
            supports_examined: report.supports_examined,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serialize");
        text.push('\n');
        text
    }
}

/// Tabular CSV of bound checks: `name,lhs,rhs,satisfied,seed,dims`, one row
/// per check, preceded by the version stamp.
pub fn bound_checks_to_csv<'a>(rows: impl Iterator<Item = (u64, &'a BoundCheck)>) -> String {
    let mut out = String::new();
    out.push_str(CSV_VERSION_HEADER);
    out.push('\n');
    out.push_str("name,lhs,rhs,satisfied,seed,dims\n");
    for (seed, check) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            check.name, check.lhs, check.rhs, check.satisfied, seed, check.context
        );
    }
    out
}

/// Tabular CSV of phase cells, sorted by (m, k) upstream.
pub fn phase_to_csv(cells: &[PhaseCell]) -> String {
    let mut out = String::new();
    out.push_str(CSV_VERSION_HEADER);
    out.push('\n');
    out.push_str("m,k,trials,successes,success_rate,mean_iterations\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.m, c.k, c.trials, c.successes, c.success_rate, c.mean_iterations
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_csv_round_trip() {
        let m = DenseMatrix::from_rows(2, 3, vec![1.5, -2.0, 1.0 / 3.0, 0.0, 1e-17, 7.25]).unwrap();
        let text = matrix_to_csv(&m);
        let back = matrix_from_csv(&text).unwrap();
        assert_eq!(m, back, "csv must round-trip doubles exactly");
    }

    #[test]
    fn matrix_csv_rejects_garbage() {
        assert!(matrix_from_csv("1.0,2.0\n3.0\n").is_err());
        assert!(matrix_from_csv("1.0,abc\n").is_err());
        assert!(matrix_from_csv("").is_err());
    }

    #[test]
    fn signal_json_round_trip_uses_one_based_indices() {
        let x = SparseSignal::new(6, vec![0, 4], vec![1.25, -3.5]).unwrap();
        let file = SignalFile::from_signal(&x);
        assert_eq!(file.entries[0].index, 1);
        assert_eq!(file.entries[1].index, 5);
        assert_eq!(file.to_signal().unwrap(), x);
        let parsed: SignalFile =
            serde_json::from_str(&signal_to_json(&x)).unwrap();
        assert_eq!(parsed, file);
    }

    #[test]
    fn signal_json_validates_indices() {
        let file = SignalFile { n: 3, entries: vec![SignalEntry { index: 4, value: 1.0 }] };
        assert!(file.to_signal().is_err());
        let zero = SignalFile { n: 3, entries: vec![SignalEntry { index: 0, value: 1.0 }] };
        assert!(zero.to_signal().is_err());
    }

    #[test]
    fn csv_headers_are_versioned() {
        let csv = bound_checks_to_csv(std::iter::empty());
        assert!(csv.starts_with("# greedylab-csv v1\n"));
        let phase = phase_to_csv(&[]);
        assert!(phase.starts_with("# greedylab-csv v1\n"));
    }
}
