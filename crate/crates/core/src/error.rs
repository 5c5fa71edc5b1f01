//! Error type shared across the crate.

use core::fmt;

/// Failure modes surfaced by construction, factorization, generation, and the
/// bound-check operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Matrix or vector dimensions are zero or inconsistent.
    BadDimensions,
    /// A value was NaN or infinite where finite data is required.
    NonFinite,
    /// The selected columns are numerically rank deficient.
    RankDeficient,
    /// Coherence is only defined for unit-norm columns.
    ColumnsNotNormalized,
    /// Exact support enumeration would exceed the configured budget; use the
    /// sampled lower bound instead.
    BudgetExceeded { supports: u128, budget: u64 },
    /// Isometry constant outside the range for which the bound is valid.
    DeltaOutOfRange,
    /// Regularized selection received an empty candidate set.
    EmptyCandidates,
    /// A stated precondition of the operation does not hold.
    PreconditionViolated(&'static str),
    /// The operation requires a nonzero vector.
    ZeroVector,
    /// The operation requires a larger problem order.
    TooSmall,
    /// A search exhausted its budget without finding an instance.
    NotFound,
    /// An index set entry is out of bounds, repeated, or not strictly
    /// increasing.
    InvalidIndexSet,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadDimensions => write!(f, "bad dimensions"),
            Error::NonFinite => write!(f, "non-finite value"),
            Error::RankDeficient => write!(f, "selected columns are rank deficient"),
            Error::ColumnsNotNormalized => write!(f, "columns are not unit-normalized"),
            Error::BudgetExceeded { supports, budget } => write!(
                f,
                "exact enumeration needs {supports} supports, over the budget of {budget}; \
                 use sampled mode"
            ),
            Error::DeltaOutOfRange => write!(f, "isometry constant out of range"),
            Error::EmptyCandidates => write!(f, "empty candidate set"),
            Error::PreconditionViolated(what) => write!(f, "precondition violated: {what}"),
            Error::ZeroVector => write!(f, "vector is zero"),
            Error::TooSmall => write!(f, "problem order too small"),
            Error::NotFound => write!(f, "search budget exhausted without a result"),
            Error::InvalidIndexSet => write!(f, "invalid index set"),
        }
    }
}

impl core::error::Error for Error {}
