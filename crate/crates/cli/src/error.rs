use std::fmt;
use std::process::ExitCode;

use nonoverlap::Error;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_HYPOTHESIS: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

/// A failure that ends the run with a specific exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::AlphaOutOfRange { .. } => EXIT_HYPOTHESIS,
            Error::Capacity { .. } | Error::SearchBudget { .. } => EXIT_RESOURCE,
            Error::InconsistentProfile(_) => EXIT_CHECK_FAILED,
            Error::OutOfHypothesis { .. }
            | Error::InvalidAlphabet(_)
            | Error::InvalidLength(_)
            | Error::SymbolOutOfRange { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::ShiftTooFar(_)
            | Error::LiftShorter { .. }
            | Error::Parse { .. }
            | Error::InvalidParameter(_) => EXIT_USAGE,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::usage(err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError {
            code: EXIT_CHECK_FAILED,
            message: format!("serialization failed: {err}"),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError {
            code: EXIT_CHECK_FAILED,
            message: format!("csv output failed: {err}"),
        }
    }
}
