use thiserror::Error;

/// Errors raised by the library. Verification outcomes (falsified,
/// inconclusive) are not errors; they are carried by the returned reports.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested evaluation mode cannot represent the value.
    #[error("mode error: {0}")]
    Mode(String),
    /// A literal could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Root finding was given a bracket without a certified sign change.
    #[error("bracket error: {0}")]
    Bracket(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
