//! Errors carrying the process exit code.

use std::fmt;

/// Exit codes: 0 success, 1 input, 2 domain, 3 reproduction mismatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Input = 1,
    Domain = 2,
    Mismatch = 3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Input, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Domain, message: message.into() }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        CliError { kind: ExitKind::Mismatch, message: message.into() }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
