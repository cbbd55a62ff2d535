//! Error taxonomy shared by the computational modules.

use thiserror::Error;

/// Errors raised by the exact and sampling kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An index or argument fell outside the declared domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two arguments that must agree (sizes, sign patterns, ...) do not.
    #[error("contract error: {0}")]
    Contract(String),

    /// The requested computation exceeds the configured budget.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// The Weingarten Gram system is singular (typically N < n).
    #[error("singularity error: {0}")]
    Singular(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn singular(msg: impl Into<String>) -> Self {
        Error::Singular(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
