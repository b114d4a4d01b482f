use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the function.
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    /// Invalid code or campaign parameters.
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),

    /// Vector lengths that must agree do not.
    #[error("size mismatch: {what} (expected {expected}, got {actual})")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// The inverse search could not bracket the requested value.
    #[error("no bracket found for phi^-1({0})")]
    NoBracket(f64),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input, as opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::NoBracket(_))
    }

    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
