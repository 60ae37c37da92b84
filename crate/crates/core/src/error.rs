use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for a tuple with k = {k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("malformed ordering: {0}")]
    MalformedOrdering(String),

    #[error("k = {k} exceeds the supported limit of {limit} for this solver")]
    TooLarge { k: usize, limit: usize },

    #[error("parameter mismatch: {0}")]
    Mismatch(String),

    #[error("malformed tour: {0}")]
    MalformedTour(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
