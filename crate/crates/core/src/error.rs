use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input bytes are not valid UTF-8.
    #[error("invalid UTF-8 in input at byte offset {offset}")]
    Encoding { offset: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no sentences in configured length range")]
    EmptyCorpus,

    #[error("no length bin has at least {min_sentences} sentences")]
    NoQualifyingBins { min_sentences: usize },

    #[error("empty length bin")]
    EmptyBin,

    #[error("no tokens at position")]
    NoTokens,

    /// A word or class lookup failed between structures built from the same corpus.
    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(&'static str),

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("non-positive value at index {index}: {value}")]
    NonPositive { index: usize, value: f64 },

    #[error("malformed position spec: {0}")]
    MalformedSpec(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 usage, 2 data, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io { .. } | Error::Csv(_) => 3,
            _ => 2,
        }
    }
}
