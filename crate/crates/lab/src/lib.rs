//! Experiment harness around `greedylab-core`: declarative specs, file
//! formats, audit and phase-sweep drivers, and the runners behind the
//! `greedylab` command-line tool.
//!
//! Exit-code contract shared by every subcommand: 0 for success or a passing
//! verdict, 1 for a legitimate negative result (a recovery miss, audit
//! violations, an exhausted search), 2 for usage, validation, or I/O errors.

use std::path::PathBuf;

use thiserror::Error;

pub mod audit;
pub mod config;
pub mod formats;
pub mod phase;
pub mod runner;

pub use config::{Algorithm, EnsembleSpec, ExperimentKind, ExperimentSpec, SignalSpec};
pub use runner::{run, Outcome};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid spec: field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("could not parse {what}: {message}")]
    Parse { what: String, message: String },
    #[error(transparent)]
    Core(#[from] greedylab_core::Error),
}
