//! Error type shared by every filter, solver and I/O routine.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid length: {0}")]
    InvalidLength(String),

    #[error("invalid frequency: {0}")]
    InvalidFrequency(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("size {size} exceeds the limit {limit} of {what}")]
    Size {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// Usage and parameter problems map to 2, problems with the data itself
    /// (non-finite samples, records that are too short, unreadable files) to 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parameter(_) | Error::InvalidFrequency(_) | Error::Size { .. } => 2,
            Error::InvalidData(_) | Error::InvalidLength(_) | Error::Dimension { .. } => 3,
            Error::Internal(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
