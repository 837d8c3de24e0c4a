use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while loading a table or computing metrics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{}: file not found", path.display())]
    FileNotFound { path: PathBuf },

    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    #[error("{source_name}: input is empty (no header record)")]
    EmptyInput { source_name: String },

    #[error("{source_name}:{line}: invalid UTF-8")]
    InvalidUtf8 { source_name: String, line: usize },

    #[error("{source_name}:{line}: expected {expected} fields, found {found}")]
    MalformedRow {
        source_name: String,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{source_name}:{line}: {message}")]
    MalformedQuote {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}: duplicate column name {name:?} in header")]
    DuplicateHeader { source_name: String, name: String },

    #[error("{source_name}: header column {index} has an empty name")]
    EmptyHeaderName { source_name: String, index: usize },

    #[error("column {column:?} cannot be numeric: value {value:?} is not a finite real number")]
    InvalidKindOverride { column: String, value: String },

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("column {0:?} is listed more than once in the attribute schema")]
    DuplicateAttribute(String),

    #[error("column {0:?} is both a quasi-identifier and a sensitive attribute")]
    OverlappingQiSa(String),

    #[error("the quasi-identifier list is empty")]
    EmptyQi,

    #[error("the sensitive-attribute list is empty")]
    EmptySa,

    #[error("{0:?} is not a sensitive attribute of the schema")]
    UnknownSa(String),

    #[error("the dataset has no rows")]
    EmptyDataset,

    #[error("the row set is empty")]
    EmptyRowSet,

    #[error("row index {index} out of range for {row_count} rows")]
    RowOutOfRange { index: usize, row_count: usize },

    #[error("value {0:?} of the local distribution is not in the global support")]
    SupportMismatch(String),

    #[error("relative distance is undefined for a reference probability of zero")]
    DivisionByZeroDomain,

    #[error("probability vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

impl Error {
    /// True for errors caused by the attribute schema rather than the input data.
    pub fn is_schema_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownColumn(_)
                | Error::DuplicateAttribute(_)
                | Error::OverlappingQiSa(_)
                | Error::EmptyQi
                | Error::EmptySa
                | Error::UnknownSa(_)
        )
    }
}
