//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry validation, the numeric kernels, and the
/// estimation pipelines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum DoaError {
    /// A geometry, scenario, or configuration field is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Matrix or vector dimensions do not fit the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The source count violates the model assumption `1 <= D < M`.
    #[error("source count {sources} is invalid for {sensors} sensors")]
    InvalidSourceCount { sources: usize, sensors: usize },

    /// A matrix that must be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    /// The least-squares system matrix is rank deficient; the propagator
    /// construction assumes its leading block is non-singular.
    #[error("matrix is singular or numerically rank deficient")]
    SingularMatrix,

    /// All polynomial coefficients are zero.
    #[error("polynomial has no nonzero coefficients")]
    ZeroPolynomial,

    /// The polynomial is constant after normalization, so it carries no
    /// signal structure to root.
    #[error("polynomial is constant; no signal roots exist")]
    NoSignalRoots,

    /// Fewer usable roots than requested source angles.
    #[error("estimation failed: {found} usable roots for {needed} sources")]
    TooFewRoots { needed: usize, found: usize },

    /// An iterative eigenvalue computation did not converge.
    #[error("eigenvalue iteration failed to converge: {0}")]
    ConvergenceFailure(&'static str),

    /// An aggregate statistic was requested over an empty collection.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// An estimator identifier could not be parsed.
    #[error("unknown algorithm: {0:?}")]
    UnknownAlgorithm(String),
}

pub type Result<T> = std::result::Result<T, DoaError>;
