use thiserror::Error;

/// Errors raised by the inference engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index ({n}, {k}) out of range: {reason}")]
    Index { n: usize, k: usize, reason: String },

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: String, iterations: usize },

    #[error("additional sample size m = {m} exceeds the exact cutoff {cutoff}; use the asymptotic approximation")]
    ExactCutoff { m: usize, cutoff: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
