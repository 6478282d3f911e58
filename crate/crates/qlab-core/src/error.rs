//! Error type shared by every module of the crate.

use alloc::string::String;
use thiserror::Error;

/// Errors produced while validating domain objects or running numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A matrix that must be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian: max |A - A*| entry {deviation:e}")]
    NotHermitian { deviation: f64 },

    /// An operator that must be positive semidefinite has a negative eigenvalue
    /// below the allowed floor.
    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// An operator that must be positive definite is singular or indefinite.
    #[error("operator is not positive definite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    /// A state vector is not normalized within tolerance.
    #[error("state vector is not normalized: |norm - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    /// A POVM whose elements do not sum to the identity.
    #[error("POVM elements do not sum to identity: max entry deviation {deviation:e}")]
    IncompletePovm { deviation: f64 },

    /// A weight vector that is not a probability distribution.
    #[error("invalid probability vector: {reason}")]
    InvalidDistribution { reason: String },

    /// Mismatched list lengths (weights vs states, POVM vs resend states, ...).
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// An input list that must be nonempty is empty.
    #[error("empty input: {what}")]
    Empty { what: &'static str },

    /// The signal states do not span the state space, which the dual
    /// certificate machinery requires.
    #[error("signal states span only a {rank}-dimensional subspace of dimension {dim}")]
    NonSpanningStates { rank: usize, dim: usize },

    /// A map was supplied in the wrong representation.
    #[error("operation requires a {expected} map representation")]
    UnsupportedRepresentation { expected: &'static str },

    /// A certificate failed its feasibility precondition.
    #[error("certificate margin {margin:e} is below the feasibility tolerance")]
    InfeasibleCertificate { margin: f64 },

    /// An iterative numerical routine failed to converge.
    #[error("numeric failure: {what}")]
    Numeric { what: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;
