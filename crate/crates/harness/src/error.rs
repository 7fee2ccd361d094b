use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config {path}: {message}")]
    ParseConfig { path: PathBuf, message: String },
    #[error("unsupported schema_version {found} (supported: {supported})")]
    SchemaVersion { found: u32, supported: u32 },
    #[error("config declares kind `{declared}` but was run as `{requested}`")]
    KindMismatch { declared: String, requested: String },
    #[error("grid field `{field}` is empty")]
    EmptyGrid { field: &'static str },
    #[error("grid field `{field}`: {reason}")]
    InvalidGrid { field: &'static str, reason: String },
    #[error("tolerance `{name}` must be positive and finite, got {value}")]
    InvalidTolerance { name: String, value: f64 },
    #[error("output directory {path} is not writable: {source}")]
    OutputNotWritable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl HarnessError {
    /// Config and validation problems, as opposed to I/O failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            HarnessError::ReadConfig { .. }
                | HarnessError::ParseConfig { .. }
                | HarnessError::SchemaVersion { .. }
                | HarnessError::KindMismatch { .. }
                | HarnessError::EmptyGrid { .. }
                | HarnessError::InvalidGrid { .. }
                | HarnessError::InvalidTolerance { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
