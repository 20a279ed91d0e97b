//! Crate-wide error type with the exit-code classes the CLI exposes.

use std::fmt;
use std::path::PathBuf;

/// Errors surfaced by the library and mapped to CLI exit codes.
#[derive(Debug)]
pub enum Error {
    /// Caller misuse: mismatched lengths, invalid flags, missing prototypes in eval mode.
    Usage(String),
    /// Malformed or missing input data (bad CSV rows, unreadable config keys).
    Data(String),
    /// Numerical failure: non-finite inputs, diverging training loss.
    Numerical(String),
    /// Filesystem failure; the path is part of the message.
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the CLI contract: 2 usage, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Data(_) | Error::Io { .. } => 3,
            Error::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
            Error::Io { path, source } => write!(f, "i/o error on {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
