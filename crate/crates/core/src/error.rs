use alloc::boxed::Box;
use alloc::string::String;

use crate::operator::TheoremReport;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Malformed or mismatched input (dimensions, unsupported space kinds).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The zero vector (or zero operator) where a nonzero one is required.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Raw difference quotients were not monotone; points at a norm bug.
    #[error("limit oracle inconsistency: {0}")]
    OracleInconsistency(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("rho_+ and rho_- additivity verdicts disagree: {0}")]
    PlusMinusDisagreement(String),
    /// A theorem check produced conditions that do not agree.
    #[error("equivalence violated: {}", .0.summary())]
    EquivalenceViolation(Box<TheoremReport>),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::InvalidInput(alloc::format!(
            "{what}: expected dimension {expected}, got {got}"
        )))
    }
}
