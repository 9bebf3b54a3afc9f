//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SjError {
    #[error("Z is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("Im Z is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("|det(CZ+D)| = {0:e} is below the singularity threshold")]
    SingularFactor(f64),
    #[error("map of order {have} cannot supply derivatives of order {need}")]
    OrderTooLow { need: usize, have: usize },
    #[error("finite-difference step {0:e} is below 1e-8")]
    StepUnderflow(f64),
    #[error("index matrix is singular (|det M| = {0:e})")]
    SingularIndex(f64),
    #[error("invalid row selection: {0}")]
    BadRowSelection(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("point lies within {0:e} of a pole")]
    PoleProximity(f64),
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("series is not theta-decomposable: {0}")]
    NotThetaDecomposable(String),
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
    #[error("invalid weight/index: {0}")]
    InvalidIndex(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, SjError>;
