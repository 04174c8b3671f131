use std::io;
use std::path::Path;

use thiserror::Error;

/// Exit status for validation problems: bad flags, unreadable or malformed input.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit status when a computation fails numerically.
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Validation(_) | CliError::Io { .. } => EXIT_VALIDATION,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

impl From<holderscope::Error> for CliError {
    fn from(e: holderscope::Error) -> Self {
        match e {
            holderscope::Error::Numeric(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::CliError::Validation(format!($($arg)*)) };
}
pub(crate) use invalid;
