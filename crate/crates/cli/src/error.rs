use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("dataset {dataset}: GET {url} failed with status {status}")]
    HttpStatus { dataset: String, url: String, status: u16 },
    #[error("dataset {dataset}: GET {url} failed: {message}")]
    Transport { dataset: String, url: String, message: String },
    #[error("dataset {dataset}: checksum mismatch (expected {expected}, got {actual}); file discarded")]
    Checksum { dataset: String, expected: String, actual: String },
    #[error("dataset {0} has no download URL; set one in a registry file")]
    NoUrl(String),
    #[error("registry: {0}")]
    Registry(String),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] zinet::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Registry(_) => EXIT_USAGE,
            CliError::Core(e) if e.kind() == zinet::ErrorKind::Numerical => EXIT_NUMERICAL,
            _ => EXIT_DATA,
        }
    }

    pub(crate) fn file(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::File { path: path.display().to_string(), source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
