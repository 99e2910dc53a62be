use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("no usable rows after dropping {dropped} incomplete rows")]
    NoUsableRows { dropped: usize },

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("non-positive value {value} at position {index} under a log transform")]
    NonPositive { index: usize, value: f64 },

    #[error("infeasible window plan: {0}")]
    InfeasibleWindows(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("numerical integration failed on [{lo}, {hi}]: achieved error {achieved:e}, requested {requested:e}")]
    Integration {
        lo: f64,
        hi: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("method `{0}` not present in report")]
    UnknownMethod(String),

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
}
