//! Error type shared by every module.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("plugging would capture free variable `{0}`")]
    Capture(String),
    #[error("invalid path")]
    InvalidPath,
    #[error("invalid redex: {0}")]
    InvalidRedex(String),
    #[error("not a beta redex")]
    NotABetaRedex,
    #[error("term is not in grammar U")]
    NotInU,
    #[error("term is not in grammar T")]
    NotInT,
    #[error("term is not pure")]
    NotPure,
    #[error("term is not a normal form")]
    NotANormalForm,
    #[error("fuel exhausted after {0} steps")]
    FuelExhausted(usize),
    #[error("internal non-termination guard tripped")]
    InternalNonTermination,
    #[error("partition does not match the multi-type")]
    PartitionMismatch,
    #[error("multi-type slice mismatch")]
    SliceMismatch,
    #[error("unsupported step: {0}")]
    UnsupportedStep(String),
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
