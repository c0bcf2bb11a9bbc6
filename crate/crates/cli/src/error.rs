use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-finite entry {text:?}")]
    NonFinite { line: usize, text: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Compute(#[from] mbal_core::Error),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for unreadable or malformed input and failed computations, 2 for
    /// parse, dimension and parameter errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Dimension { .. } | Self::InvalidArgument(_) => 2,
            Self::Compute(e) => match e {
                mbal_core::Error::DimensionMismatch { .. }
                | mbal_core::Error::EmptyMatrix
                | mbal_core::Error::InvalidNorm(_)
                | mbal_core::Error::InvalidRadix(_)
                | mbal_core::Error::InvalidOption(_)
                | mbal_core::Error::InvalidParameter(_) => 2,
                _ => 1,
            },
            Self::Io { .. } | Self::NonFinite { .. } | Self::Serialize(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
