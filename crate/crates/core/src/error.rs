use thiserror::Error;

/// Failure modes shared by every engine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-convergent configuration: {0}")]
    NonConvergent(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cross-check mismatch: {0}")]
    CrossCheck(String),
    #[error("sampler rejection cap exceeded: {0}")]
    SamplerCap(String),
    #[error("unknown identity: {0}")]
    UnknownIdentity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
