//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by matrix construction, solvers, tuning and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or malformed input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// Shape mismatch between operands.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    /// A matrix required to be positive definite failed its Cholesky factorization.
    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: String },

    /// A scatter matrix failed the positive semidefinite acceptance check.
    #[error("matrix is not positive semidefinite within tolerance ({context})")]
    NotPositiveSemidefinite { context: String },

    /// Numerical degeneracy detected while updating a column of the precision matrix.
    #[error("numerical degeneracy in column {col}: {what}")]
    DegenerateColumn { col: usize, what: String },

    /// Adaptive quadrature failed to reach the requested relative tolerance.
    #[error(
        "quadrature did not reach tolerance: requested {requested:.3e}, achieved {achieved:.3e}"
    )]
    Quadrature { requested: f64, achieved: f64 },

    /// A Monte Carlo estimate has too small an effective sample size to be trusted.
    #[error("unreliable Monte Carlo estimate: effective sample size {ess:.1} < {min_ess}")]
    UnreliableEstimate { ess: f64, min_ess: f64 },

    /// Every start of a multi-start run failed.
    #[error("all {n_starts} solver starts failed; first error: {first}")]
    AllStartsFailed { n_starts: usize, first: Box<Error> },

    /// Every grid value of a cross-validation run was disqualified.
    #[error("cross-validation failed: every grid value had at least one failed fold")]
    CvAllDisqualified,

    /// Invalid structure specification for synthetic precision matrices.
    #[error("invalid structure spec: {0}")]
    Structure(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV parse failure.
    #[error("parse error at line {line}: {what}")]
    Parse { line: usize, what: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 2 = input/parse problems, 4 = numerical degeneracy, 1 = anything else.
    /// (Exit 3, non-convergence, is not an error: the estimate is still written.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_)
            | Error::Dimension { .. }
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Structure(_) => 2,
            Error::DegenerateColumn { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NotPositiveSemidefinite { .. } => 4,
            // A run where every start failed is classified by what felled it.
            Error::AllStartsFailed { first, .. } => first.exit_code(),
            _ => 1,
        }
    }
}
