use num_bigint::BigInt;
use thiserror::Error;

/// Errors shared across the library.  Variants distinguish "the input is bad"
/// from "a computational budget ran out" from "an internal invariant failed",
/// because callers (notably the CLI) map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("factorization budget exhausted; unfactored cofactor {0}")]
    FactorBudget(BigInt),

    #[error("search bound exhausted: {0}")]
    BoundExhausted(String),

    #[error("inconclusive within configured limits: {0}")]
    Inconclusive(String),

    #[error("precision ladder exhausted at {bits} bits while {context}")]
    PrecisionExhausted { bits: u32, context: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
