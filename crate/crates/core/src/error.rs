use thiserror::Error;

/// Errors raised by the solver and the kinematics model.
///
/// Divergence during tracking is not an error: it is reported through
/// [`SolveReport`](crate::SolveReport) with `converged == false`.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e}, threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("invalid tracker configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid manipulator parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
