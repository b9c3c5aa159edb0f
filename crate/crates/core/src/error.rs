use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sequence too short: need n_max >= {required}, got {actual}")]
    InsufficientLength { required: usize, actual: usize },

    #[error("unsupported starting dimension {0} (closed-form walks start at d = 1 or d = 2)")]
    UnsupportedDimension(usize),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("{0} did not converge")]
    NoConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
