//! Error type shared by all analyses.

use alloc::string::String;
use core::fmt;

/// Errors produced by panel construction and the analysis operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent input data (shapes, dates, parsing).
    Data(String),
    /// A value lies outside the mathematical domain of an operation,
    /// e.g. a non-positive level passed to a log-return transform.
    Domain(String),
    /// A parameter violates an operation's preconditions.
    Invalid(String),
    /// An iterative routine failed to converge.
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Invalid(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
