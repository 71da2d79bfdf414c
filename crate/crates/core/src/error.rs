use thiserror::Error;

/// Errors raised by the arithmetic and module layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a unit: {0}")]
    NotUnit(String),
    #[error("precision underflow: {0}")]
    PrecisionUnderflow(String),
    #[error("polynomial {0} is reducible")]
    Reducible(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A mathematical identity that must hold failed to hold.
    #[error("consistency violation: {0}")]
    Consistency(String),
}

impl Error {
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
