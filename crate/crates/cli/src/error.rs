use std::fmt;

use basis_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Csv { path: String, message: String },

    #[error("{0}")]
    Usage(String),
}

/// Stable category used for the exit status and the stderr error line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Schema,
    Infeasible,
    InsufficientData,
    Invalid,
    Io,
    Usage,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Schema => 2,
            ErrorKind::Infeasible => 3,
            ErrorKind::InsufficientData => 4,
            ErrorKind::Invalid | ErrorKind::Io | ErrorKind::Usage => 1,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Schema => "schema",
            ErrorKind::Infeasible => "infeasible",
            ErrorKind::InsufficientData => "insufficient_data",
            ErrorKind::Invalid => "invalid_parameter",
            ErrorKind::Io => "io",
            ErrorKind::Usage => "usage",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl CliError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            CliError::Core(e) => match e {
                CoreError::Schema(_) | CoreError::Misaligned(_) => ErrorKind::Schema,
                CoreError::Infeasible(_) => ErrorKind::Infeasible,
                CoreError::InsufficientData(_) | CoreError::EmptyInput | CoreError::UnresolvableQuantile { .. } => {
                    ErrorKind::InsufficientData
                }
                _ => ErrorKind::Invalid,
            },
            CliError::Config(_) | CliError::Csv { .. } => ErrorKind::Schema,
            CliError::Io { .. } => ErrorKind::Io,
            CliError::Usage(_) => ErrorKind::Usage,
        }
    }

    /// Single line for stderr: `error kind=<kind> exit=<code> message="<text>"`.
    pub fn machine_line(&self) -> String {
        let kind = self.kind();
        format!("error kind={kind} exit={} message={:?}", kind.exit_code(), self.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
