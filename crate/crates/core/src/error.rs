use std::fmt;

/// Where in an input file a parse failure happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseLocation {
    /// 1-based line number of a text input.
    Line(usize),
    /// 0-based byte offset into a binary input.
    Byte(usize),
}

impl fmt::Display for ParseLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseLocation::Line(line) => write!(f, "line {line}"),
            ParseLocation::Byte(offset) => write!(f, "byte offset {offset}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported objective: {0}")]
    UnsupportedObjective(String),

    #[error("parse error at {at}: {message}")]
    Parse { at: ParseLocation, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::Parameter(message.into())
    }

    pub(crate) fn parse(at: ParseLocation, message: impl Into<String>) -> Self {
        Error::Parse {
            at,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
