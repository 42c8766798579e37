//! Serialization and formatting helpers behind the `qcorr` binary.

pub mod format;
pub mod io;

use std::fmt;

/// Process exit code for bad flags, unreadable files and schema violations.
pub const EXIT_USAGE: i32 = 1;
/// Process exit code when an optimizer reports non-convergence.
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<qcorr_core::Error> for CliError {
    fn from(err: qcorr_core::Error) -> Self {
        Self::usage(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::usage(err.to_string())
    }
}
