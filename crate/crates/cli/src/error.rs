use std::path::PathBuf;
use std::process::ExitCode;

use hoi_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub const EXIT_FAILURE: u8 = 1;
// Usage errors exit with 2 from the argument parser itself.
pub const EXIT_MISSING_FILE: u8 = 3;
pub const EXIT_BAD_INPUT: u8 = 4;
pub const EXIT_EMPTY_DATASET: u8 = 5;
pub const EXIT_CONFIG: u8 = 6;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Core(Error::Io { source, .. })
                if source.kind() == std::io::ErrorKind::NotFound =>
            {
                EXIT_MISSING_FILE
            }
            CliError::Core(Error::Parse { .. } | Error::Format(_)) => EXIT_BAD_INPUT,
            CliError::Core(Error::EmptyDataset(_)) => EXIT_EMPTY_DATASET,
            CliError::Core(Error::Config(_)) => EXIT_CONFIG,
            _ => EXIT_FAILURE,
        };
        ExitCode::from(code)
    }
}
