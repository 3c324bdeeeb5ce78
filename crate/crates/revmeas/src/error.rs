use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {err}")]
    Schema { path: PathBuf, err: SchemaError },
    #[error("{path}: {source}")]
    State {
        path: PathBuf,
        #[source]
        source: revmeas_core::Error,
    },
    #[error(transparent)]
    Core(#[from] revmeas_core::Error),
    #[error("report has no rows")]
    EmptyReport,
}

/// Malformed or ill-shaped JSON input.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}{}", location(*.offset, *.line, *.column))]
pub struct SchemaError {
    pub message: String,
    /// Byte offset into the file, when the error has a position.
    pub offset: Option<usize>,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

fn location(offset: Option<usize>, line: Option<usize>, column: Option<usize>) -> String {
    match (offset, line, column) {
        (Some(o), Some(l), Some(c)) => format!(" (byte offset {o}, line {l}, column {c})"),
        _ => String::new(),
    }
}

impl SchemaError {
    pub fn shape(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            offset: None,
            line: None,
            column: None,
        }
    }
}
