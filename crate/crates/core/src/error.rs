use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has {0} entries, which is not a positive square")]
    BadShape(usize),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("element is not positive: minimum eigenvalue {min_eigenvalue:e} below -{tolerance:e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("matrix is singular (smallest pivot or eigenvalue magnitude {0:e})")]
    Singular(f64),

    #[error("value {value} outside the unit interval in {context}")]
    OutsideUnitInterval { value: f64, context: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("iteration diverged at step {step}")]
    Diverged { step: usize },

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    IterationLimit { iterations: usize, last_step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
