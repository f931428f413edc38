use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A basis label or parameter lies outside its allowed range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Step or truncation refinement failed to settle.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
