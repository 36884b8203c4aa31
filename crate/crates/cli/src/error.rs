use std::path::PathBuf;

use thiserror::Error;

/// Failure reading orders, prices or a ledger.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {reason}")]
    Line {
        source_name: String,
        line: usize,
        reason: String,
    },
    #[error("{source_name}: data row {row}: {reason}")]
    Row {
        source_name: String,
        row: usize,
        reason: String,
    },
    #[error("{source_name}: {reason}")]
    Format { source_name: String, reason: String },
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.into(),
            source,
        }
    }
}
