//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by numerical routines, model constructors, and experiment
/// drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix expected to be symmetric positive definite failed the
    /// factorization: the pivot at `index` fell below the tolerance.
    #[error("matrix is not positive definite: pivot {pivot:.3e} at index {index} below tolerance {tolerance:.3e}")]
    NotPositiveDefinite {
        index: usize,
        pivot: f64,
        tolerance: f64,
    },

    /// A Wishart draw was requested with fewer degrees of freedom than the
    /// matrix dimension, which yields a singular matrix.
    #[error("degenerate Wishart: {df} degrees of freedom is below dimension {dim}")]
    DegenerateWishart { df: usize, dim: usize },

    /// A parameter was outside its documented domain.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter {
        name: &'static str,
        message: String,
    },

    /// A series or iteration failed to converge within its budget.
    #[error("{what} did not converge within {limit} iterations")]
    NoConvergence { what: &'static str, limit: usize },

    /// Distribution parameters at which the quality approximation collapses
    /// to a point mass and has no density.
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    /// A portfolio with all-zero weights has no defined quality.
    #[error("portfolio weights are all zero")]
    ZeroPortfolio,

    /// A model whose maximal quality is zero admits no angle comparison.
    #[error("degenerate model: maximal quality is zero")]
    DegenerateModel,

    /// The (estimated) covariance could not be inverted.
    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    /// The feature Gram matrix could not be inverted.
    #[error("singular features: {0}")]
    SingularFeatures(String),

    /// A constraint matrix did not have full row rank.
    #[error("rank deficient constraints: {0}")]
    RankDeficient(String),

    /// Dimensions of two arguments do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Too many Monte Carlo replicates failed to produce an estimate.
    #[error("{failed} of {total} replicates failed, above the {percent_limit}% limit")]
    TooManyFailures {
        failed: usize,
        total: usize,
        percent_limit: f64,
    },

    /// A returns sample is too short for the requested estimator.
    #[error("insufficient observations: need at least {needed}, got {got}")]
    InsufficientObservations { needed: usize, got: usize },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
