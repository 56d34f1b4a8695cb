//! Run failures and their exit codes.

use std::fmt;

/// Exit code of a run whose checked properties all held.
pub const EXIT_PASS: u8 = 0;
/// Exit code when a checked property fails.
pub const EXIT_FAIL: u8 = 1;
/// Exit code for usage, configuration and budget errors.
pub const EXIT_USAGE: u8 = 2;

/// Errors that stop a run before it can report PASS or FAIL.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget(String),
    Library(nilradon::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Budget(m) => write!(f, "budget error: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<nilradon::Error> for CliError {
    fn from(e: nilradon::Error) -> Self {
        match e {
            nilradon::Error::Budget { .. } => CliError::Budget(e.to_string()),
            other => CliError::Library(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
