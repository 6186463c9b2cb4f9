use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// Search and resource failures are kept apart from "no result": a search that runs
/// out of budget never reports a negative answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search limit exceeded: {0}")]
    SearchLimit(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("structure undetermined: {0}")]
    Undetermined(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// True for budget exhaustion (search nodes, norms, prime supply).
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::SearchLimit(_) | Error::Resource(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
