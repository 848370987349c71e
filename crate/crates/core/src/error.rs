use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module.
///
/// The CLI maps these onto exit codes: [`Error::Violation`] is 1,
/// [`Error::Capacity`] is 3, everything caused by bad input is 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("identity violated: {0}")]
    Violation(String),
    #[error("scope error: {0}")]
    Scope(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
}

impl Error {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Violation(_) | Error::Internal(_) => 1,
            Error::Capacity(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
