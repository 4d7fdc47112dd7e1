use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zero tensor has no normalized direction")]
    ZeroTensor,
    #[error("tensor is not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("tensor is not symmetric")]
    NotSymmetric,
    #[error("no mode of size 2")]
    NoPencilMode,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("witness ({0}) does not give an invertible combination")]
    InvalidWitness(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("certificate verification failed: {0}")]
    VerificationFailed(String),
    #[error("contradictory rank evidence: {0}")]
    Contradiction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
