//! Greedy sparse approximation over dense real matrices.
//!
//! The crate implements orthogonal matching pursuit (OMP) and regularized
//! orthogonal matching pursuit (ROMP) with full per-iteration tracing, exact
//! and sampled computation of restricted isometry constants, and
//! machine-checkable verifiers for the inequalities that underpin the
//! recovery guarantees of both algorithms.
//!
//! Modules:
//!
//! * [`mat`]: dense row-major matrices and small vector helpers.
//! * [`linalg`]: Householder least squares, orthogonal projectors, column
//!   orthogonalization, and a symmetric (Jacobi) eigensolver.
//! * [`model`]: sensing-matrix ensembles, sparse test signals, coherence,
//!   and restricted isometry constants ([`model::rip`]).
//! * [`greedy`]: OMP and ROMP with [`greedy::RecoveryTrace`] audit records.
//! * [`theory`]: bound checks for the recovery analysis and the search for
//!   matrices on which OMP provably fails.
//! * [`oracles`]: deliberately naive reference implementations used by the
//!   test suites to cross-check the fast paths.
//!
//! Everything is a pure function of its inputs; all randomness is drawn from
//! caller-supplied seeds. Indices are 0-based throughout.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod greedy;
pub mod linalg;
pub mod mat;
pub mod model;
pub mod oracles;
pub mod theory;

pub use error::Error;
pub use mat::DenseMatrix;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
