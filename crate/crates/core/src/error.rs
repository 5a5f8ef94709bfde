use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The variants split into two families: bad input (`Domain`, `Parse`,
/// `Validation`, `Usage`, `Io`) and broken mathematics (`Invariant`,
/// `DataCorruption`). The CLI maps the first to exit code 2 and the
/// second to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error ({invariant}): {message}")]
    Validation {
        invariant: &'static str,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("invariant violated ({invariant}): {message}")]
    Invariant {
        invariant: &'static str,
        message: String,
    },

    #[error("data corruption: {0}")]
    DataCorruption(String),

    #[error("no eigenforms at this level")]
    NoEigenforms,

    #[error("insufficient Hecke data: rank of X is {0} but no Hecke operators were supplied")]
    InsufficientHeckeData(usize),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(invariant: &'static str, msg: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            message: msg.into(),
        }
    }

    pub(crate) fn validation(invariant: &'static str, msg: impl Into<String>) -> Self {
        Error::Validation {
            invariant,
            message: msg.into(),
        }
    }

    /// True for failures of a mathematical invariant, as opposed to bad input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::Invariant { .. } | Error::DataCorruption(_) | Error::Validation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
