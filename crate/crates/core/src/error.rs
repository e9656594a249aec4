use thiserror::Error;

/// Errors raised by the numerical and exact routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("factorization does not match {n}: {reason}")]
    BadFactorization { n: u64, reason: String },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("exact integer overflow: {0}")]
    Overflow(String),

    #[error("no convergence after {iters} iterations: {what}")]
    NoConvergence { what: String, iters: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by budgets or iteration limits rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::ResourceLimit(_) | Error::Overflow(_) | Error::NoConvergence { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
