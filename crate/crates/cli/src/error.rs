use std::fmt;
use std::path::Path;

use placy_core::Error;

/// Process exit status of a failed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// A file could not be opened, read or written.
    File = 2,
    /// Malformed input or an invalid combination of options.
    Config = 3,
    /// The analysis itself failed on valid input.
    Analysis = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Failure,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Failure, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Failure::Config, message)
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(Failure::File, format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let kind = match err.root() {
            Error::Io { .. } => Failure::File,
            Error::InvalidInput(_)
            | Error::Parse { .. }
            | Error::UnusableColumn(_)
            | Error::DimensionMismatch { .. }
            | Error::Csv(_)
            | Error::Json(_) => Failure::Config,
            _ => Failure::Analysis,
        };
        Self::new(kind, err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
