use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{path}:{line}: {msg}")]
    Params { path: String, line: usize, msg: String },
    #[error("{0}")]
    Core(mcc_core::Error),
    #[error("decryption failed: {0}")]
    Decrypt(String),
}

impl CliError {
    /// 1 usage, 2 malformed input, 3 decryption failure, 4 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Format(_) | CliError::Params { .. } => 2,
            CliError::Core(mcc_core::Error::Invariant(_)) => 4,
            CliError::Core(_) => 2,
            CliError::Decrypt(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<mcc_core::Error> for CliError {
    fn from(e: mcc_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Problems reading a key or ciphertext file.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("unexpected key kind {0}")]
    Kind(u8),
    #[error("truncated at byte {0}")]
    Truncated(usize),
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("nonzero padding bits")]
    Padding,
    #[error("field {field}: {msg}")]
    Field { field: &'static str, msg: String },
    #[error("key fails validation: {0}")]
    Invalid(mcc_core::Error),
}
