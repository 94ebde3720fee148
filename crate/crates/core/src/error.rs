use thiserror::Error;

/// Errors raised by construction, shortening, coding and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {name}={value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("shortening pattern is not valid: {0}")]
    InvalidPattern(crate::shortening::Violation),

    #[error("message length {k} is too large for exhaustive decoding (limit {limit})")]
    TooLarge { k: usize, limit: usize },

    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}
