use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}:{line}: node id overflows u64")]
    IdOverflow { path: PathBuf, line: usize },

    #[error("{0}: no edges or nodes found")]
    EmptyInput(PathBuf),

    #[error("graph has {0} nodes, more than the u32 id space allows")]
    TooManyNodes(u64),

    #[error("title {title:?} is mapped to both id {first} and id {second}")]
    AmbiguousLabel {
        title: String,
        first: u64,
        second: u64,
    },

    #[error("unresolved subset entries: {}", .0.join(", "))]
    Unresolved(Vec<String>),

    #[error("duplicate subset entry {0:?}")]
    DuplicateEntry(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge in {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("dense oracle refused: N = {0} exceeds the limit of {1}")]
    TooLargeForDense(usize, usize),

    #[error("reduced matrix sets are incompatible: {0}")]
    Mismatch(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of an iterative method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
