use thiserror::Error;

/// Errors raised by the entropy toolkit.
///
/// The variants mirror the CLI exit codes: contract violations and
/// invariant failures are bugs or bad inputs, size limits are resource
/// refusals the caller can fix by coarsening parameters.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("size limit exceeded: {what} would need {needed} elements (cap {cap}); {hint}")]
    SizeLimit {
        what: &'static str,
        needed: u128,
        cap: usize,
        hint: &'static str,
    },
    #[error("map {index} ({kind}) is not invertible")]
    NotInvertible { index: usize, kind: String },
    #[error("estimation error: {0}")]
    Estimation(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
