//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by configuration, evaluation, and the experiment pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector was passed to an operation expecting a different dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Lower/upper bound arrays are inconsistent.
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    /// An algorithm or run configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The fitness-evaluation budget has been consumed. Signals clean
    /// termination of an optimization loop, not a crash.
    #[error("fitness evaluation budget exhausted")]
    BudgetExhausted,

    /// A problem name could not be resolved in the registry.
    #[error("unknown problem '{name}'; valid names: {valid}")]
    UnknownProblem { name: String, valid: String },

    /// An algorithm name could not be resolved.
    #[error("unknown algorithm '{name}'; valid names: {valid}")]
    UnknownAlgorithm { name: String, valid: String },

    /// An experiment plan file could not be parsed.
    #[error("malformed plan: {0}")]
    Plan(String),

    /// A result grid is missing one or more expected cells.
    #[error("missing data: {0}")]
    MissingData(String),

    /// A persisted results file could not be parsed.
    #[error("malformed results file: {0}")]
    MalformedResults(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
