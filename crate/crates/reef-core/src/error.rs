//! Error types shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (left is {left}, right is {right})")]
    DimensionMismatch {
        context: &'static str,
        left: String,
        right: String,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "matrix is not symmetric within {tolerance:e} at ({row},{col}): {left} vs {right}"
    )]
    NotSymmetric {
        row: usize,
        col: usize,
        left: f64,
        right: f64,
        tolerance: f64,
    },

    #[error(
        "matrix is not positive definite (pivot {pivot:e} at row {row}); \
         add a small diagonal jitter and retry"
    )]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("non-finite value rejected: {context}")]
    NonFinite { context: &'static str },

    #[error("schema error: columns missing from header: {}", .missing.join(", "))]
    MissingColumns { missing: Vec<String> },

    #[error("schema error: {0}")]
    InvalidSchema(String),

    #[error("no usable rows after ingestion ({rows_removed} removed)")]
    EmptyDataset { rows_removed: usize },

    #[error("dataset is empty: {context}")]
    NoRows { context: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "system is rank deficient even after 1e-10 diagonal jitter; \
         features are collinear (or there are too few rows)"
    )]
    RankDeficient,

    #[error("need at least {needed} rows to fit {what}, got {got}")]
    TooFewRows {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("R^2 is undefined: y_true is constant (total sum of squares is zero)")]
    UndefinedR2,

    #[error("proportions must sum to 1 within 1e-9, got {sum}")]
    InvalidProportions { sum: f64 },

    #[error("ensemble member {index} failed to fit: {source}")]
    MemberFit {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("model '{model}' failed: {source}")]
    ModelFailed {
        model: String,
        #[source]
        source: Box<Error>,
    },

    #[error("stage '{stage}' failed: {source}")]
    StageFailed {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(
        "input columns do not match model schema: missing [{}], unexpected [{}]",
        .missing.join(", "),
        .extra.join(", ")
    )]
    ColumnMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("unsupported model document: {0}")]
    BadModelFile(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn csv(context: impl Into<String>, source: csv::Error) -> Self {
        Error::Csv {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
