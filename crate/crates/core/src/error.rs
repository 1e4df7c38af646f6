use thiserror::Error;

/// Errors raised by the arithmetic, group and pairing layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("support overlap at place {0}")]
    SupportOverlap(String),
    #[error("size bound exceeded: {0}")]
    Size(String),
    #[error("insufficient degree bound: {0}")]
    InsufficientBound(String),
    #[error("no n-th root in the working field; adjoin {0}")]
    ExtensionDegree(String),
    #[error("oracle inapplicable: {0}")]
    OracleInapplicable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
