use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

pub const EXIT_COMPUTE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Compute(_) => EXIT_COMPUTE,
        })
    }
}

impl From<eigenbath::Error> for CliError {
    fn from(e: eigenbath::Error) -> Self {
        match e {
            eigenbath::Error::Domain(msg) => CliError::Config(msg),
            eigenbath::Error::Resource { .. } => CliError::Resource(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
