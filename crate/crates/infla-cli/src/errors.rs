//! CLI error type carrying exit codes.

use std::fmt;

/// Process-level error categories: configuration problems exit with 2,
/// data problems with 3 and numerical failures with 4.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numerical(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<infla_core::Error> for CliError {
    fn from(err: infla_core::Error) -> Self {
        match err {
            infla_core::Error::Numerical(msg) => CliError::Numerical(msg),
            infla_core::Error::Data(msg)
            | infla_core::Error::Domain(msg)
            | infla_core::Error::Invalid(msg) => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Data(err.to_string())
    }
}
