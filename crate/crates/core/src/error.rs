use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An unsupported or inconsistent configuration was requested.
    #[error("configuration error: {0}")]
    Config(String),
    /// A self-validation (doubling or convergence) test did not pass.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// A Monte Carlo estimate could not be formed.
    #[error("estimation error: {0}")]
    Estimation(String),
    /// A theorem hypothesis required by a checker does not hold.
    #[error("precondition error: hypothesis ({index}) violated: {reason}")]
    Precondition { index: usize, reason: String },
    /// A numerically certified convention (measure, identity) failed.
    #[error("convention error: {0}")]
    Convention(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
