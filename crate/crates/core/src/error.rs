use thiserror::Error;

/// Errors shared by every module of the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// A precondition on the arguments does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The request would exceed a configured resource budget.
    #[error("{what} needs {required} {unit} but the budget is {budget} {unit}")]
    Budget {
        what: &'static str,
        required: u64,
        budget: u64,
        unit: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidInput(msg.into()))
}
