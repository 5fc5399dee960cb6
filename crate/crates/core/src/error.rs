use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An exhaustive routine was asked to enumerate more than it is built for.
    #[error("{what}: size {actual} exceeds the limit of {limit}")]
    SizeLimitExceeded { what: String, limit: usize, actual: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Vertex ids are reported 1-based, as in the text formats.
    #[error("edge ({0}, {1}) is not present in the graph")]
    EdgeAbsent(usize, usize),

    #[error("degree pair ({0}, {1}) is outside the supported range 1..=4")]
    DegreeTooLarge(usize, usize),

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("equilibrium count overflowed 64 bits")]
    CountOverflow,
}

impl Error {
    pub(crate) fn size_limit(what: impl Into<String>, limit: usize, actual: usize) -> Self {
        Error::SizeLimitExceeded { what: what.into(), limit, actual }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
